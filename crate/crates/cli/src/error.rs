use std::fmt;
use toric_core::catalog::CatalogError;
use toric_core::intersection::IntersectionError;
use toric_core::linalg::LinalgError;
use toric_core::sheaf::SheafError;
use toric_core::stability::StabilityError;
use toric_core::FanError;

/// Exit code for invalid input.
pub const EXIT_VALIDATION: u8 = 2;

/// A diagnostic with a stable name, e.g. `NonPrimitiveRay` or `NotAmple`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub code: u8,
}

impl CliError {
    pub fn validation(kind: impl Into<String>, message: impl Into<String>) -> Self {
        CliError { kind: kind.into(), message: message.into(), code: EXIT_VALIDATION }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<FanError> for CliError {
    fn from(e: FanError) -> Self {
        match &e {
            FanError::Invalid(v) => {
                let mut kinds: Vec<&str> = v.iter().map(|x| x.kind()).collect();
                kinds.dedup();
                let lines: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                CliError::validation(kinds.join(","), format!("invalid fan\n  {}", lines.join("\n  ")))
            }
            FanError::UnknownRay(_) => CliError::validation("UnknownRay", e.to_string()),
            _ => CliError::validation("InvalidFan", e.to_string()),
        }
    }
}

impl From<IntersectionError> for CliError {
    fn from(e: IntersectionError) -> Self {
        match e {
            IntersectionError::NotAmple => CliError::validation("NotAmple", "polarization is not ample"),
            IntersectionError::Fan(f) => f.into(),
            other => CliError::validation("InvalidDivisor", other.to_string()),
        }
    }
}

impl From<SheafError> for CliError {
    fn from(e: SheafError) -> Self {
        CliError::validation("InvalidSheaf", e.to_string())
    }
}

impl From<LinalgError> for CliError {
    fn from(e: LinalgError) -> Self {
        CliError::validation("InvalidSheaf", e.to_string())
    }
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::UnknownLabel(_) => CliError::validation("UnknownLabel", e.to_string()),
            CatalogError::InvalidParameters(_) => CliError::validation("InvalidParameters", e.to_string()),
            CatalogError::Fan(f) => f.into(),
            CatalogError::Sheaf(s) => s.into(),
        }
    }
}

impl From<StabilityError> for CliError {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::NotAmple => CliError::validation("NotAmple", "polarization is not ample"),
            StabilityError::NotFano(_) => CliError::validation("NotFano", e.to_string()),
            StabilityError::Intersection(i) => i.into(),
            StabilityError::Sheaf(s) => s.into(),
            StabilityError::Catalog(c) => c.into(),
            StabilityError::Fan(f) => f.into(),
            StabilityError::Linalg(l) => l.into(),
            StabilityError::InvalidParameters(_) => CliError::validation("InvalidParameters", e.to_string()),
            StabilityError::Inconsistent(_) => {
                CliError { kind: "Inconsistent".into(), message: e.to_string(), code: 1 }
            }
        }
    }
}
