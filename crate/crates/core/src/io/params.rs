use super::{join, read_document, to_canonical_json, IoError, ParseOptions};
use crate::calibration::{CalibrationError, Priors};
use crate::defect::{DefectError, DefectModelParams};

/// Parameter validation messages start with the offending field.
pub(crate) fn locate_params(err: DefectError, prefix: &str) -> IoError {
    let msg = err.to_string();
    let detail = msg.strip_prefix("invalid parameters: ").unwrap_or(&msg);
    let field = detail
        .split([' ', ':'])
        .next()
        .filter(|f| !f.is_empty())
        .unwrap_or("$");
    IoError::validation(join(prefix, field), msg.clone())
}

/// Defect-model parameters; absent fields take their defaults.
pub fn parse_params(text: &str, opts: ParseOptions) -> Result<DefectModelParams, IoError> {
    let p: DefectModelParams = read_document(text, opts)?;
    p.validate().map_err(|e| locate_params(e, "$"))?;
    Ok(p)
}

/// Validate params embedded in a larger document, with paths under
/// `prefix`.
pub fn validate_params_at(params: &DefectModelParams, prefix: &str) -> Result<(), IoError> {
    params.validate().map_err(|e| locate_params(e, prefix))
}

pub fn serialize_params(params: &DefectModelParams) -> String {
    to_canonical_json(params)
}

pub fn parse_priors(text: &str, opts: ParseOptions) -> Result<Priors, IoError> {
    let p: Priors = read_document(text, opts)?;
    p.validate().map_err(|e| match e {
        CalibrationError::InvalidPriors(m) => {
            let field = m.split([' ', '[']).next().unwrap_or("$").to_string();
            IoError::validation(field, m)
        }
        other => IoError::validation("$", other),
    })?;
    Ok(p)
}

pub fn serialize_priors(priors: &Priors) -> String {
    to_canonical_json(priors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let text = serialize_params(&DefectModelParams::default());
        let p = parse_params(&text, ParseOptions::default()).unwrap();
        assert_eq!(p, DefectModelParams::default());
        assert_eq!(serialize_params(&p), text);
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let p = parse_params(r#"{"detection": [0.1, 0.2, 0.3, 0.4, 0.5]}"#, ParseOptions::default()).unwrap();
        assert_eq!(p.detection, [0.1, 0.2, 0.3, 0.4, 0.5]);
        assert_eq!(p.insertion_rates, DefectModelParams::default().insertion_rates);
    }

    #[test]
    fn invalid_values_have_paths() {
        let err = parse_params(r#"{"detection": [0.1, 0.2, 1.3, 0.4, 0.5]}"#, ParseOptions::default()).unwrap_err();
        assert_eq!(err.path(), "detection[2]");
        let err = parse_params(r#"{"detecton": [0.1]}"#, ParseOptions::default()).unwrap_err();
        assert_eq!(err.path(), "detecton");
        let err = parse_priors(r#"{"pseudo_count": -1}"#, ParseOptions::default()).unwrap_err();
        assert_eq!(err.path(), "pseudo_count");
        let err = parse_priors(
            r#"{"rate_bounds": [[1, 2], [1, 2], [3, 2], [1, 2], [1, 2]]}"#,
            ParseOptions::default(),
        )
        .unwrap_err();
        assert_eq!(err.path(), "rate_bounds");
    }
}
