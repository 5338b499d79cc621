use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use bingham_core::{
    bounds_table, choose_m, cov_bounded, cov_expansion, grad_bounded, grad_psi_truncated,
    load_matrix, materialize, mc_cov, mc_psi, power_sums, psi_bounded, psi_remainder_bound,
    psi_truncated, zonal_c, zonal_grad, BoundKind, Error, GrowthRegime, PowerSums, RemainderBound,
    SymmetricMatrix,
};

use crate::{Command, Format, RegimeArgs};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::RegimeViolation { .. }
            | Error::InadmissibleDimension { .. }
            | Error::Capacity { .. }
            | Error::Overflow(_)
            | Error::Numeric(_)
            | Error::NonConvergence(_) => 1,
            Error::Parse { .. }
            | Error::Asymmetric { .. }
            | Error::DimensionTooSmall(_)
            | Error::DimensionMismatch { .. }
            | Error::InsufficientPowerSums { .. }
            | Error::OutOfRange { .. }
            | Error::InvalidRegime { .. } => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> CliResult<String> {
    match command {
        Command::Psi { matrix, m, regime } => psi(&matrix, m, regime),
        Command::Grad { matrix, m, regime } => grad(&matrix, m, regime),
        Command::Cov {
            matrix,
            l,
            m,
            regime,
        } => cov(&matrix, l, m, regime),
        Command::Zonal { matrix, k } => zonal(&matrix, k),
        Command::Bounds {
            gamma0,
            r,
            d,
            m,
            format,
            out,
        } => bounds(gamma0, r, &d, &m, format, out.as_deref()),
        Command::ChooseM { gamma0, r, d, eps } => choose(gamma0, r, d, eps),
        Command::Verify {
            matrix,
            samples,
            seed,
            l,
            m,
            regime,
        } => verify(&matrix, samples, seed, l, m, regime),
    }
}

fn read_matrix(path: &Path) -> CliResult<SymmetricMatrix> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    load_matrix(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn regime_of(args: RegimeArgs) -> CliResult<Option<GrowthRegime>> {
    match (args.gamma0, args.r) {
        (Some(g), Some(r)) => Ok(Some(GrowthRegime::new(g, r)?)),
        _ => Ok(None),
    }
}

fn sums_for(s: &SymmetricMatrix, order: u32) -> CliResult<PowerSums> {
    Ok(power_sums(s, order.max(1) as usize)?)
}

fn dimension(d: u64) -> CliResult<f64> {
    if d < 2 {
        return Err(CliError::usage(format!(
            "dimension d = {d} must be an integer >= 2"
        )));
    }
    Ok(d as f64)
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn psi(path: &Path, m: u32, regime: RegimeArgs) -> CliResult<String> {
    let s = read_matrix(path)?;
    let ps = sums_for(&s, m)?;
    let mut out = format!("d = {}\nm = {m}\n", s.dim());
    match regime_of(regime)? {
        Some(regime) => {
            let bv = psi_bounded(&ps, m, regime)?;
            let _ = writeln!(out, "psi = {}", num(bv.value));
            if let RemainderBound::Explicit(b) = bv.bound {
                let _ = writeln!(out, "bound = {}", num(b));
            }
        }
        None => {
            let _ = writeln!(out, "psi = {}", num(psi_truncated(&ps, m)?));
        }
    }
    Ok(out)
}

fn grad(path: &Path, m: u32, regime: RegimeArgs) -> CliResult<String> {
    let s = read_matrix(path)?;
    let ps = sums_for(&s, m)?;
    let (poly, bound) = match regime_of(regime)? {
        Some(regime) => {
            let bv = grad_bounded(&ps, m, regime)?;
            let bound = match bv.bound {
                RemainderBound::Explicit(b) => Some(b),
                RemainderBound::Asymptotic { .. } => None,
            };
            (bv.value, bound)
        }
        None => (grad_psi_truncated(&ps, m)?, None),
    };
    let g = materialize(&poly, &s)?;
    let mut out = format!("d = {}\nm = {m}\ngrad =\n{}", s.dim(), g.to_text());
    if let Some(b) = bound {
        let _ = writeln!(out, "bound = {}", num(b));
    }
    Ok(out)
}

fn alpha_descriptor(m: u32, regime: Option<&GrowthRegime>) -> String {
    let formula = if m <= 2 { "(2-r)/2" } else { "(3-2r)/2" };
    match regime {
        Some(g) => format!(
            "remainder = O(d^-alpha), alpha = {formula} = {}",
            num(g.covariance_alpha(m))
        ),
        None => format!("remainder = O(d^-alpha), alpha = {formula}"),
    }
}

fn cov(path: &Path, l: u32, m: u32, regime: RegimeArgs) -> CliResult<String> {
    let s = read_matrix(path)?;
    let ps = sums_for(&s, l.max(m))?;
    let regime = regime_of(regime)?;
    let mut out = format!("d = {}\nl = {l}\nm = {m}\n", s.dim());
    match regime {
        Some(g) => {
            let bv = cov_bounded(&ps, &s, l, m, g)?;
            let _ = write!(out, "cov =\n{}", bv.value.to_text());
            let _ = writeln!(out, "{}", alpha_descriptor(m, Some(&g)));
            if let RemainderBound::Asymptotic {
                proof_trace: Some(b),
                ..
            } = bv.bound
            {
                let _ = writeln!(out, "proof_trace_bound = {}", num(b));
            }
        }
        None => {
            let c = cov_expansion(&ps, &s, l, m)?;
            let _ = write!(out, "cov =\n{}", c.to_text());
            let _ = writeln!(out, "{}", alpha_descriptor(m, None));
        }
    }
    Ok(out)
}

fn zonal(path: &Path, k: u32) -> CliResult<String> {
    let s = read_matrix(path)?;
    let ps = sums_for(&s, k)?;
    let c = zonal_c(k, &ps)?;
    let g = zonal_grad(k, &ps)?;
    let coeffs: Vec<String> = g.coeffs().iter().map(|&c| num(c)).collect();
    Ok(format!(
        "d = {}\nk = {k}\nC = {}\ngrad_coeffs = {}\n",
        s.dim(),
        num(c),
        coeffs.join(",")
    ))
}

fn text_table(table: &bingham_core::BoundsTable) -> String {
    let mut out = String::new();
    for (kind, title) in [
        (BoundKind::Psi, "psi remainder bounds"),
        (BoundKind::Grad, "grad remainder bounds"),
    ] {
        let _ = write!(out, "{title}\n{:>10}", "d");
        for m in &table.m_list {
            let _ = write!(out, " {:>24}", format!("m={m}"));
        }
        out.push('\n');
        for (d, row) in table.d_list.iter().zip(table.grid(kind)) {
            let _ = write!(out, "{d:>10}");
            for v in row {
                let _ = write!(out, " {v:>24.16e}");
            }
            out.push('\n');
        }
        if kind == BoundKind::Psi {
            out.push('\n');
        }
    }
    out
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

fn bounds(
    gamma0: f64,
    r: f64,
    d: &[u64],
    m: &[u32],
    format: Format,
    out: Option<&Path>,
) -> CliResult<String> {
    let regime = GrowthRegime::new(gamma0, r)?;
    let d_list = d
        .iter()
        .map(|&d| dimension(d))
        .collect::<CliResult<Vec<_>>>()?;
    let table = bounds_table(regime, &d_list, m)?;
    match (format, out) {
        (Format::Csv, None) => Ok(format!(
            "{}\n{}",
            table.to_csv(BoundKind::Psi),
            table.to_csv(BoundKind::Grad)
        )),
        (Format::Csv, Some(prefix)) => {
            let psi_path = with_suffix(prefix, "_psi.csv");
            let grad_path = with_suffix(prefix, "_grad.csv");
            write_file(&psi_path, &table.to_csv(BoundKind::Psi))?;
            write_file(&grad_path, &table.to_csv(BoundKind::Grad))?;
            Ok(format!("{}\n{}\n", psi_path.display(), grad_path.display()))
        }
        (Format::Md, None) => Ok(table.to_markdown()),
        (Format::Text, None) => Ok(text_table(&table)),
        (format, Some(prefix)) => {
            let (ext, body) = if format == Format::Md {
                (".md", table.to_markdown())
            } else {
                (".txt", text_table(&table))
            };
            let path = with_suffix(prefix, ext);
            write_file(&path, &body)?;
            Ok(format!("{}\n", path.display()))
        }
    }
}

fn choose(gamma0: f64, r: f64, d: u64, eps: f64) -> CliResult<String> {
    let regime = GrowthRegime::new(gamma0, r)?;
    let choice = choose_m(&regime, dimension(d)?, eps)?;
    Ok(format!(
        "m = {}\npsi_bound = {}\ngrad_bound = {}\n",
        choice.m,
        num(choice.psi_bound),
        num(choice.grad_bound)
    ))
}

struct Check {
    name: String,
    estimate: f64,
    std_error: f64,
    series: f64,
    bound: Option<f64>,
}

impl Check {
    fn passes(&self) -> bool {
        (self.estimate - self.series).abs() <= 4.0 * self.std_error + self.bound.unwrap_or(0.0)
    }
}

fn verify(
    path: &Path,
    samples: usize,
    seed: u64,
    l: u32,
    m: u32,
    regime: RegimeArgs,
) -> CliResult<String> {
    let s = read_matrix(path)?;
    let d = s.dim();
    let ps = sums_for(&s, l.max(m))?;
    let regime = regime_of(regime)?;

    let (psi_value, psi_bound, cov_value, cov_bound) = match regime {
        Some(g) => {
            let p = psi_bounded(&ps, m, g)?;
            let c = cov_bounded(&ps, &s, l, m, g)?;
            let cb = match c.bound {
                RemainderBound::Asymptotic { proof_trace, .. } => proof_trace,
                RemainderBound::Explicit(b) => Some(b),
            };
            (
                p.value,
                Some(psi_remainder_bound(m, d as f64, &g)?),
                c.value,
                cb,
            )
        }
        None => (
            psi_truncated(&ps, m)?,
            None,
            cov_expansion(&ps, &s, l, m)?,
            None,
        ),
    };

    let psi_mc = mc_psi(&s, samples, seed)?;
    let cov_mc = mc_cov(&s, samples, seed)?;

    let mut checks = vec![Check {
        name: "psi".into(),
        estimate: psi_mc.value,
        std_error: psi_mc.std_error,
        series: psi_value,
        bound: psi_bound,
    }];
    for i in 0..d {
        for j in i..d {
            checks.push(Check {
                name: format!("cov_{}_{}", i + 1, j + 1),
                estimate: cov_mc.value.get(i, j),
                std_error: cov_mc.std_error.get(i, j),
                series: cov_value.get(i, j),
                bound: cov_bound,
            });
        }
    }

    let mut out = format!("# samples = {samples}, seed = {seed}, l = {l}, m = {m}\ncheck,estimate,std_error,series,bound,pass\n");
    for c in &checks {
        let bound = c.bound.map(|b| format!("{b:.16e}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{},{}",
            c.name,
            c.estimate,
            c.std_error,
            c.series,
            bound,
            if c.passes() { "PASS" } else { "FAIL" }
        );
    }
    let passed = checks.iter().filter(|c| c.passes()).count();
    let _ = writeln!(out, "# {passed}/{} checks passed", checks.len());
    Ok(out)
}
