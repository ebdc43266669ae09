//! Explicit-matrix subset of the TSPLIB format.

use std::fmt::Write as _;
use std::path::Path;

use super::{BenchError, TspInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightFormat {
    FullMatrix,
    LowerDiagRow,
    UpperRow,
    UpperDiagRow,
}

impl WeightFormat {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "FULL_MATRIX" => WeightFormat::FullMatrix,
            "LOWER_DIAG_ROW" => WeightFormat::LowerDiagRow,
            "UPPER_ROW" => WeightFormat::UpperRow,
            "UPPER_DIAG_ROW" => WeightFormat::UpperDiagRow,
            _ => return None,
        })
    }

    fn keyword(self) -> &'static str {
        match self {
            WeightFormat::FullMatrix => "FULL_MATRIX",
            WeightFormat::LowerDiagRow => "LOWER_DIAG_ROW",
            WeightFormat::UpperRow => "UPPER_ROW",
            WeightFormat::UpperDiagRow => "UPPER_DIAG_ROW",
        }
    }

    /// Matrix cells in file order.
    fn cells(self, n: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..n {
            let cols = match self {
                WeightFormat::FullMatrix => 0..n,
                WeightFormat::LowerDiagRow => 0..i + 1,
                WeightFormat::UpperRow => i + 1..n,
                WeightFormat::UpperDiagRow => i..n,
            };
            out.extend(cols.map(|j| (i, j)));
        }
        out
    }
}

pub fn parse_tsplib_file(path: impl AsRef<Path>) -> Result<TspInstance, BenchError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::Io(path.display().to_string(), e.to_string()))?;
    parse_tsplib(&text)
}

pub fn parse_tsplib(text: &str) -> Result<TspInstance, BenchError> {
    let mut name = String::new();
    let mut dimension: Option<usize> = None;
    let mut format: Option<WeightFormat> = None;
    let lines = text.lines().enumerate();
    let mut weights: Vec<(usize, i64)> = Vec::new();
    // inside EDGE_WEIGHT_SECTION, or inside a skipped coordinate section
    let mut in_section = false;
    let mut skipping = false;
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        let keyword_line = line.chars().next().is_some_and(|c| c.is_ascii_alphabetic());
        if skipping && !keyword_line {
            continue;
        }
        skipping = false;
        if in_section {
            if keyword_line {
                in_section = false;
            } else {
                for tok in line.split_whitespace() {
                    let w = tok.parse::<i64>().map_err(|_| BenchError::Parse {
                        line: line_no,
                        msg: format!("bad edge weight {tok:?}"),
                    })?;
                    weights.push((line_no, w));
                }
                continue;
            }
        }
        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => (line, ""),
        };
        match key {
            "NAME" => name = value.to_string(),
            "COMMENT" => {}
            "TYPE" if value == "TSP" => {}
            "TYPE" => return Err(BenchError::Unsupported("TYPE", value.to_string())),
            "DIMENSION" => {
                dimension = Some(value.parse().map_err(|_| BenchError::Parse {
                    line: line_no,
                    msg: format!("bad DIMENSION {value:?}"),
                })?)
            }
            "EDGE_WEIGHT_TYPE" if value == "EXPLICIT" => {}
            "EDGE_WEIGHT_TYPE" => return Err(BenchError::Unsupported("EDGE_WEIGHT_TYPE", value.to_string())),
            "EDGE_WEIGHT_FORMAT" => {
                format = Some(
                    WeightFormat::parse(value)
                        .ok_or_else(|| BenchError::Unsupported("EDGE_WEIGHT_FORMAT", value.to_string()))?,
                )
            }
            "DISPLAY_DATA_TYPE" | "NODE_COORD_TYPE" => {}
            "EDGE_WEIGHT_SECTION" => in_section = true,
            // coordinates are not used
            "DISPLAY_DATA_SECTION" | "NODE_COORD_SECTION" => skipping = true,
            other => {
                return Err(BenchError::Parse {
                    line: line_no,
                    msg: format!("unknown keyword {other:?}"),
                })
            }
        }
    }
    let n = dimension.ok_or(BenchError::Missing("DIMENSION"))?;
    let format = format.ok_or(BenchError::Missing("EDGE_WEIGHT_FORMAT"))?;
    let cells = format.cells(n);
    if weights.len() != cells.len() {
        let line = weights.last().map_or(0, |w| w.0);
        return Err(BenchError::Parse {
            line,
            msg: format!("expected {} edge weights, found {}", cells.len(), weights.len()),
        });
    }
    let mut dist = vec![vec![0i64; n]; n];
    let mut set = vec![vec![false; n]; n];
    for (&(i, j), &(line, w)) in cells.iter().zip(&weights) {
        if w < 0 {
            return Err(BenchError::Parse {
                line,
                msg: format!("negative weight {w}"),
            });
        }
        for (a, b) in [(i, j), (j, i)] {
            if i != j && set[a][b] && dist[a][b] != w {
                return Err(BenchError::Parse {
                    line,
                    msg: format!("asymmetric weights between {i} and {j}"),
                });
            }
            dist[a][b] = w;
            set[a][b] = true;
        }
    }
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0;
    }
    TspInstance::new(name, dist)
}

/// Writes `instance` in the given explicit format.
pub fn emit_tsplib(instance: &TspInstance, format: WeightFormat) -> String {
    let n = instance.n();
    let mut s = String::new();
    let _ = writeln!(s, "NAME: {}", instance.name);
    let _ = writeln!(s, "TYPE: TSP");
    let _ = writeln!(s, "DIMENSION: {n}");
    let _ = writeln!(s, "EDGE_WEIGHT_TYPE: EXPLICIT");
    let _ = writeln!(s, "EDGE_WEIGHT_FORMAT: {}", format.keyword());
    let _ = writeln!(s, "EDGE_WEIGHT_SECTION");
    let cells = format.cells(n);
    let mut row = None;
    let mut line: Vec<String> = Vec::new();
    for (i, j) in cells {
        if row != Some(i) && !line.is_empty() {
            let _ = writeln!(s, "{}", line.join(" "));
            line.clear();
        }
        row = Some(i);
        line.push(instance.dist[i][j].to_string());
    }
    if !line.is_empty() {
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s.push_str("EOF\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "NAME: tiny\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\n\
        EDGE_WEIGHT_FORMAT: LOWER_DIAG_ROW\nEDGE_WEIGHT_SECTION\n0 5 0 7 9 0\nEOF\n";

    #[test]
    fn lower_diag_row() {
        let t = parse_tsplib(TINY).unwrap();
        assert_eq!(t.dist[0][1], 5);
        assert_eq!(t.dist[0][2], 7);
        assert_eq!(t.dist[1][2], 9);
        assert_eq!(t.dist[2][1], 9);
    }

    #[test]
    fn every_format_round_trips() {
        let t = parse_tsplib(TINY).unwrap();
        for f in [
            WeightFormat::FullMatrix,
            WeightFormat::LowerDiagRow,
            WeightFormat::UpperRow,
            WeightFormat::UpperDiagRow,
        ] {
            assert_eq!(parse_tsplib(&emit_tsplib(&t, f)).unwrap(), t);
        }
    }

    #[test]
    fn unsupported_format_is_named() {
        let text = TINY.replace("LOWER_DIAG_ROW", "LOWER_COL");
        let err = parse_tsplib(&text).unwrap_err();
        assert!(err.to_string().contains("EDGE_WEIGHT_FORMAT"), "{err}");
        let text = TINY.replace("EXPLICIT", "EUC_2D");
        assert!(parse_tsplib(&text).unwrap_err().to_string().contains("EDGE_WEIGHT_TYPE"));
    }

    #[test]
    fn bad_number_reports_line() {
        let text = TINY.replace("0 5 0 7 9 0", "0 5 0\n7 x 0");
        assert_eq!(
            parse_tsplib(&text).unwrap_err(),
            BenchError::Parse {
                line: 8,
                msg: "bad edge weight \"x\"".into()
            }
        );
    }

    #[test]
    fn display_data_is_skipped() {
        let text = TINY.replace("EOF", "DISPLAY_DATA_SECTION\n1 0.0 1.0\n2 3.0 4.0\n3 1.0 1.0\nEOF");
        assert_eq!(parse_tsplib(&text).unwrap(), parse_tsplib(TINY).unwrap());
    }

    #[test]
    fn wrong_count() {
        let text = TINY.replace("0 5 0 7 9 0", "0 5 0 7 9");
        assert!(matches!(parse_tsplib(&text), Err(BenchError::Parse { .. })));
    }
}
