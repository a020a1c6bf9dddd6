use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use hankel_spectral::serde_complex::C64;
use hankel_spectral::Complex64;
use serde_json::{json, Value};

#[derive(Debug)]
pub enum CliError {
    Domain(hankel_spectral::Error),
    Io { path: String, detail: String },
    Input(String),
    /// The computation finished but a check did not pass.
    Threshold(String),
}

impl From<hankel_spectral::Error> for CliError {
    fn from(e: hankel_spectral::Error) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    pub fn to_json(&self) -> Value {
        let (kind, detail) = match self {
            CliError::Domain(e) => (e.kind(), e.to_string()),
            CliError::Io { path, detail } => ("Io", format!("{path}: {detail}")),
            CliError::Input(d) => ("InvalidInput", d.clone()),
            CliError::Threshold(d) => ("ThresholdExceeded", d.clone()),
        };
        json!({ "error": { "kind": kind, "detail": detail } })
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_input(path: &Path) -> CliResult<String> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::File::open(path).and_then(|mut f| f.read_to_string(&mut text).map(|_| ()))
    };
    res.map_err(|e| CliError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    Ok(text)
}

pub fn parse<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{what}: {e}")))
}

pub fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io {
            path: p.display().to_string(),
            detail: e.to_string(),
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io {
                    path: "<stdout>".into(),
                    detail: e.to_string(),
                })
        }
    }
}

pub fn write_json(path: Option<&Path>, value: &impl serde::Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Input(e.to_string()))?;
    text.push('\n');
    write_output(path, &text)
}

/// Coefficients from a coefficient file, any object with a `coefficients`
/// array, or a bare array of `{"re", "im"}`.
pub fn parse_coefficients(text: &str) -> CliResult<Vec<Complex64>> {
    let value: Value = parse(text, "coefficients")?;
    let array = match &value {
        Value::Array(_) => value,
        Value::Object(map) => map
            .get("coefficients")
            .cloned()
            .ok_or_else(|| CliError::Input("object has no \"coefficients\" field".into()))?,
        _ => return Err(CliError::Input("expected an array or an object".into())),
    };
    let raw: Vec<C64> =
        serde_json::from_value(array).map_err(|e| CliError::Input(format!("coefficients: {e}")))?;
    Ok(raw.into_iter().map(Complex64::from).collect())
}

/// CSV rows `t,re,im,abs` with 17 significant digits and `\n` endings.
pub fn boundary_csv(rows: &[(f64, Complex64)]) -> String {
    let mut out = String::from("t,re,im,abs\n");
    for (t, u) in rows {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", t, u.re, u.im, u.norm()).expect("string write");
    }
    out
}
