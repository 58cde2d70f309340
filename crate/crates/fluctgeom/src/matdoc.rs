//! Matrix exchange format: a flat text document carrying the fibre
//! half-dimension `n` and a row-major array of numbers, either 4n×4n (a
//! candidate doubled-fibre endomorphism) or 2n×2n (a form or structure on
//! phase space).
//!
//! ```text
//! # comment
//! n = 1
//! mat =
//! 0 0 0 1
//! 0 0 -1 0
//! 0 1 0 0
//! -1 0 0 0
//! ```
//!
//! Numbers after `mat =` may continue across lines; `#` starts a comment.
//! The exchange precision is fixed at `f64`.

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DocError {
    #[error("line {line}: expected `key = value`, got {content:?}")]
    BadLine { line: usize, content: String },
    #[error("line {line}: unable to parse {token:?} as a number")]
    BadNumber { line: usize, token: String },
    #[error("missing required field {0:?}")]
    MissingField(&'static str),
    #[error("duplicate field {0:?}")]
    DuplicateField(String),
    #[error("field n must be a positive integer, got {0:?}")]
    BadN(String),
    #[error(
        "matrix has {count} entries; expected {exp_form} (2n x 2n) or {exp_gcs} (4n x 4n) for n = {n}"
    )]
    BadEntryCount {
        count: usize,
        n: usize,
        exp_form: usize,
        exp_gcs: usize,
    },
    #[error("matrix document holds a {got}x{got} matrix; expected {expected}x{expected}")]
    WrongKind { expected: usize, got: usize },
}

/// Which of the two admissible shapes the document carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// 2n×2n: a form (ω, B) or structure (J) on phase space.
    PhaseSpace,
    /// 4n×4n: a candidate endomorphism of the doubled fibre.
    DoubledFibre,
}

/// A parsed matrix document.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDoc {
    pub n: usize,
    pub kind: MatrixKind,
    pub mat: DMatrix<f64>,
}

impl MatrixDoc {
    /// The matrix, checked to be the 4n×4n doubled-fibre shape.
    pub fn expect_doubled(&self) -> Result<&DMatrix<f64>, DocError> {
        match self.kind {
            MatrixKind::DoubledFibre => Ok(&self.mat),
            MatrixKind::PhaseSpace => Err(DocError::WrongKind {
                expected: 4 * self.n,
                got: 2 * self.n,
            }),
        }
    }

    /// The matrix, checked to be the 2n×2n phase-space shape.
    pub fn expect_phase_space(&self) -> Result<&DMatrix<f64>, DocError> {
        match self.kind {
            MatrixKind::PhaseSpace => Ok(&self.mat),
            MatrixKind::DoubledFibre => Err(DocError::WrongKind {
                expected: 2 * self.n,
                got: 4 * self.n,
            }),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(idx) => &line[..idx],
        None => line,
    }
}

/// Parse a matrix document from text.
pub fn parse_matrix_doc(text: &str) -> Result<MatrixDoc, DocError> {
    let mut n: Option<usize> = None;
    let mut entries: Vec<f64> = Vec::new();
    let mut in_matrix = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if !in_matrix {
            let (key, value) = line.split_once('=').ok_or_else(|| DocError::BadLine {
                line: line_no,
                content: raw.trim().to_string(),
            })?;
            match key.trim() {
                "n" => {
                    if n.is_some() {
                        return Err(DocError::DuplicateField("n".into()));
                    }
                    let v = value.trim();
                    let parsed: usize = v.parse().map_err(|_| DocError::BadN(v.to_string()))?;
                    if parsed == 0 {
                        return Err(DocError::BadN(v.to_string()));
                    }
                    n = Some(parsed);
                }
                "mat" => {
                    in_matrix = true;
                    parse_numbers(value, line_no, &mut entries)?;
                }
                other => {
                    return Err(DocError::BadLine {
                        line: line_no,
                        content: other.to_string(),
                    })
                }
            }
        } else {
            parse_numbers(line, line_no, &mut entries)?;
        }
    }

    let n = n.ok_or(DocError::MissingField("n"))?;
    if !in_matrix {
        return Err(DocError::MissingField("mat"));
    }
    let form_dim = 2 * n;
    let gcs_dim = 4 * n;
    let kind = if entries.len() == form_dim * form_dim {
        MatrixKind::PhaseSpace
    } else if entries.len() == gcs_dim * gcs_dim {
        MatrixKind::DoubledFibre
    } else {
        return Err(DocError::BadEntryCount {
            count: entries.len(),
            n,
            exp_form: form_dim * form_dim,
            exp_gcs: gcs_dim * gcs_dim,
        });
    };
    let dim = match kind {
        MatrixKind::PhaseSpace => form_dim,
        MatrixKind::DoubledFibre => gcs_dim,
    };
    Ok(MatrixDoc {
        n,
        kind,
        mat: DMatrix::from_row_slice(dim, dim, &entries),
    })
}

fn parse_numbers(chunk: &str, line_no: usize, out: &mut Vec<f64>) -> Result<(), DocError> {
    for token in chunk.split([' ', '\t', ',']).filter(|t| !t.is_empty()) {
        let value: f64 = token.parse().map_err(|_| DocError::BadNumber {
            line: line_no,
            token: token.to_string(),
        })?;
        out.push(value);
    }
    Ok(())
}

/// Render a matrix document; floats carry 17 significant digits so the
/// round-trip is lossless.
pub fn write_matrix_doc(n: usize, mat: &DMatrix<f64>) -> String {
    let mut out = String::new();
    out.push_str(&format!("n = {n}\n"));
    out.push_str("mat =\n");
    for i in 0..mat.nrows() {
        let row: Vec<String> = (0..mat.ncols())
            .map(|j| format!("{:.16e}", mat[(i, j)]))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# standard symplectic-type structure\nn = 1\nmat =\n0 0 0 1\n0 0 -1 0\n0 1 0 0\n-1 0 0 0\n";

    #[test]
    fn parses_doubled_fibre_doc() {
        let doc = parse_matrix_doc(SAMPLE).unwrap();
        assert_eq!(doc.n, 1);
        assert_eq!(doc.kind, MatrixKind::DoubledFibre);
        assert_eq!(doc.mat[(0, 3)], 1.0);
        assert_eq!(doc.mat[(3, 0)], -1.0);
        assert!(doc.expect_doubled().is_ok());
        assert!(doc.expect_phase_space().is_err());
    }

    #[test]
    fn parses_phase_space_doc_with_commas() {
        let doc = parse_matrix_doc("n = 1\nmat = 0, 1, -1, 0\n").unwrap();
        assert_eq!(doc.kind, MatrixKind::PhaseSpace);
        assert_eq!(doc.mat, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(matches!(
            parse_matrix_doc("mat = 1 2 3 4\n"),
            Err(DocError::MissingField("n"))
        ));
        assert!(matches!(
            parse_matrix_doc("n = 1\n"),
            Err(DocError::MissingField("mat"))
        ));
        assert!(matches!(
            parse_matrix_doc("n = 0\nmat = 1\n"),
            Err(DocError::BadN(_))
        ));
        assert!(matches!(
            parse_matrix_doc("n = 1\nmat = 1 2 three 4\n"),
            Err(DocError::BadNumber { .. })
        ));
        assert!(matches!(
            parse_matrix_doc("n = 1\nmat = 1 2 3\n"),
            Err(DocError::BadEntryCount { .. })
        ));
        assert!(matches!(
            parse_matrix_doc("n = 1\nn = 2\nmat = 0 1 -1 0\n"),
            Err(DocError::DuplicateField(_))
        ));
        assert!(matches!(
            parse_matrix_doc("nonsense line\nn = 1\nmat = 0 1 -1 0\n"),
            Err(DocError::BadLine { line: 1, .. })
        ));
    }

    #[test]
    fn write_then_parse_roundtrips_bitwise() {
        let mat = DMatrix::from_row_slice(
            2,
            2,
            &[0.0, std::f64::consts::PI, -std::f64::consts::PI, 0.0],
        );
        let text = write_matrix_doc(1, &mat);
        let doc = parse_matrix_doc(&text).unwrap();
        assert_eq!(doc.mat, mat);
    }
}
