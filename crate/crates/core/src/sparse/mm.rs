//! Matrix Market coordinate I/O (`real`, `symmetric` or `general`).

use std::fmt::Write as _;
use std::io::BufRead;

use super::{CscMatrix, SparseError};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Storage {
    General,
    Symmetric,
}

/// Parses a Matrix Market stream into a square CSC matrix.
///
/// Symmetric files store the lower triangle; the strictly-lower entries are
/// mirrored. Entries with value `0.0` are dropped.
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<CscMatrix, SparseError> {
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input"))?;
    let header = header?;
    let storage = parse_header(&header)?;

    let mut size: Option<(usize, usize)> = None;
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut fields = t.split_whitespace();
        match size {
            None => {
                let rows = parse_field::<usize>(fields.next(), line_no, "row count")?;
                let cols = parse_field::<usize>(fields.next(), line_no, "column count")?;
                let nnz = parse_field::<usize>(fields.next(), line_no, "entry count")?;
                if rows != cols {
                    return Err(SparseError::UnsupportedFormat(format!(
                        "non-square matrix {rows}x{cols}"
                    )));
                }
                size = Some((rows, nnz));
                entries.reserve(if storage == Storage::Symmetric { 2 * nnz } else { nnz });
            }
            Some((n, _)) => {
                let i = parse_field::<usize>(fields.next(), line_no, "row index")?;
                let j = parse_field::<usize>(fields.next(), line_no, "column index")?;
                let v = parse_field::<f64>(fields.next(), line_no, "value")?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(parse_err(line_no, &format!("index ({i}, {j}) outside 1..={n}")));
                }
                if !v.is_finite() {
                    return Err(parse_err(line_no, "non-finite value"));
                }
                let (i, j) = (i - 1, j - 1);
                if storage == Storage::Symmetric && i < j {
                    return Err(parse_err(
                        line_no,
                        "symmetric file stores an entry above the diagonal",
                    ));
                }
                if v == 0.0 {
                    continue;
                }
                entries.push((i, j, v));
                if storage == Storage::Symmetric && i != j {
                    entries.push((j, i, v));
                }
            }
        }
    }
    let (n, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    let stored = match storage {
        Storage::General => entries.len(),
        Storage::Symmetric => entries.iter().filter(|(i, j, _)| i >= j).count(),
    };
    if stored > nnz {
        return Err(parse_err(1, &format!("size line announces {nnz} entries, found more")));
    }
    CscMatrix::from_triplets(&entries, n)
}

/// Serializes to Matrix Market text with 17 significant digits.
///
/// Symmetric matrices are written as their lower triangle.
pub fn write_matrix_market(m: &CscMatrix) -> String {
    let symmetric = m.is_symmetric();
    let mut out = String::new();
    let kind = if symmetric { "symmetric" } else { "general" };
    writeln!(out, "%%MatrixMarket matrix coordinate real {kind}").unwrap();
    let count = if symmetric {
        (0..m.n())
            .map(|j| m.column(j).0.iter().filter(|&&i| i >= j).count())
            .sum()
    } else {
        m.nnz()
    };
    writeln!(out, "{} {} {}", m.n(), m.n(), count).unwrap();
    for j in 0..m.n() {
        let (rows, vals) = m.column(j);
        for (&i, &v) in rows.iter().zip(vals) {
            if symmetric && i < j {
                continue;
            }
            writeln!(out, "{} {} {:.16e}", i + 1, j + 1, v).unwrap();
        }
    }
    out
}

fn parse_header(header: &str) -> Result<Storage, SparseError> {
    let lower = header.trim().to_ascii_lowercase();
    let tokens: Vec<&str> = lower.split_whitespace().collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, "expected '%%MatrixMarket matrix ...' header"));
    }
    if tokens[2] != "coordinate" {
        return Err(SparseError::UnsupportedFormat(format!("layout '{}'", tokens[2])));
    }
    if tokens[3] != "real" {
        return Err(SparseError::UnsupportedFormat(format!("field '{}'", tokens[3])));
    }
    match tokens[4] {
        "general" => Ok(Storage::General),
        "symmetric" => Ok(Storage::Symmetric),
        other => Err(SparseError::UnsupportedFormat(format!("symmetry '{other}'"))),
    }
}

fn parse_field<T: std::str::FromStr>(
    field: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, SparseError> {
    let raw = field.ok_or_else(|| parse_err(line, &format!("missing {what}")))?;
    raw.parse()
        .map_err(|_| parse_err(line, &format!("invalid {what} '{raw}'")))
}

fn parse_err(line: usize, msg: &str) -> SparseError {
    SparseError::Parse {
        line,
        msg: msg.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn read(text: &str) -> Result<CscMatrix, SparseError> {
        read_matrix_market(text.as_bytes())
    }

    #[test]
    fn symmetric_lower_triangle_is_mirrored() {
        let a = read(
            "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 3\n1 1 2\n2 1 1\n2 2 2\n",
        )
        .unwrap();
        let expect =
            CscMatrix::from_triplets(&[(0, 0, 2.0), (1, 0, 1.0), (0, 1, 1.0), (1, 1, 2.0)], 2)
                .unwrap();
        assert_eq!(a, expect);
        assert!(a.is_symmetric());
    }

    #[test]
    fn general_asymmetric_file() {
        let a = read("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n1 2 3.0\n")
            .unwrap();
        assert!(!a.is_symmetric());
        assert_eq!(a.get(0, 1), Some(3.0));
    }

    #[test]
    fn unsupported_fields_and_layouts() {
        for header in [
            "%%MatrixMarket matrix coordinate complex general",
            "%%MatrixMarket matrix coordinate pattern symmetric",
            "%%MatrixMarket matrix array real general",
            "%%MatrixMarket matrix coordinate real hermitian",
        ] {
            let err = read(&format!("{header}\n1 1 1\n1 1 1\n")).unwrap_err();
            assert!(matches!(err, SparseError::UnsupportedFormat(_)), "{header}: {err:?}");
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = read("%%MatrixMarket matrix coordinate real general\n2 2 1\n\n1 x 2\n").unwrap_err();
        assert!(matches!(err, SparseError::Parse { line: 4, .. }), "{err:?}");
        let err = read("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 2\n").unwrap_err();
        assert!(matches!(err, SparseError::Parse { line: 3, .. }), "{err:?}");
        let err = read("not a header\n").unwrap_err();
        assert!(matches!(err, SparseError::Parse { line: 1, .. }));
    }

    #[test]
    fn identity_is_written_as_two_entries() {
        let text = write_matrix_market(&CscMatrix::identity(2));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "%%MatrixMarket matrix coordinate real symmetric");
        assert_eq!(lines[1], "2 2 2");
        assert_eq!(lines.len(), 4);
        for (line, expect) in lines[2..].iter().zip(["1 1", "2 2"]) {
            assert!(line.starts_with(expect));
            let v: f64 = line.split_whitespace().nth(2).unwrap().parse().unwrap();
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn zero_matrix_has_size_line_only() {
        let text = write_matrix_market(&CscMatrix::zeros(3));
        assert_eq!(text.lines().collect::<Vec<_>>()[1..], ["3 3 0"]);
        assert_eq!(read(&text).unwrap(), CscMatrix::zeros(3));
    }

    fn arb_matrix() -> impl Strategy<Value = CscMatrix> {
        (1usize..12, any::<bool>()).prop_flat_map(|(n, sym)| {
            proptest::collection::btree_map(
                (0..n, 0..n),
                prop_oneof![any::<f64>().prop_filter("finite nonzero", |v| v.is_finite() && *v != 0.0), -1e3..1e3f64],
                0..(n * n),
            )
            .prop_map(move |map| {
                let mut entries = Vec::new();
                for (&(i, j), &v) in &map {
                    if v == 0.0 {
                        continue;
                    }
                    if sym {
                        if i >= j {
                            entries.push((i, j, v));
                            if i != j {
                                entries.push((j, i, v));
                            }
                        }
                    } else {
                        entries.push((i, j, v));
                    }
                }
                CscMatrix::from_triplets(&entries, n).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(m in arb_matrix()) {
            let back = read(&write_matrix_market(&m)).unwrap();
            prop_assert_eq!(back.col_ptr(), m.col_ptr());
            prop_assert_eq!(back.row_ind(), m.row_ind());
            let same_bits = back.values().iter().zip(m.values()).all(|(a, b)| a.to_bits() == b.to_bits());
            prop_assert!(same_bits);
            prop_assert_eq!(back.is_symmetric(), m.is_symmetric());
        }
    }
}
