//! Dataset ingestion: a dense ARFF subset and headed CSV, plus a CSV
//! writer whose output reloads to the exact same dataset.
//!
//! Class labels are densified in lexicographic order of the class names,
//! so the label assignment depends only on the set of names, never on row
//! or declaration order.

use std::fs;
use std::path::{Path, PathBuf};

use rrc_core::{Dataset, DatasetError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("cannot infer format of {0} (expected .arff or .csv)")]
    UnknownFormat(PathBuf),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

fn parse_err(line: usize, message: impl Into<String>) -> IngestError {
    IngestError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    Arff,
    Csv,
}

impl SourceFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "arff" => Some(Self::Arff),
            "csv" => Some(Self::Csv),
            _ => None,
        }
    }
}

/// Loaded dataset plus the count of rows dropped for missing values.
#[derive(Debug)]
pub struct LoadOutcome {
    pub data: Dataset,
    pub dropped_rows: usize,
}

/// Load a dataset, picking the parser from the file extension. The class
/// is the last attribute (ARFF) or last column (CSV).
pub fn load_dataset(path: &Path) -> Result<LoadOutcome, IngestError> {
    let format =
        SourceFormat::from_path(path).ok_or_else(|| IngestError::UnknownFormat(path.into()))?;
    let text = fs::read_to_string(path)?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset");
    match format {
        SourceFormat::Arff => parse_arff(&text, stem, None),
        SourceFormat::Csv => parse_csv(&text, stem),
    }
}

#[derive(Debug)]
enum AttrKind {
    Numeric,
    Nominal(Vec<String>),
}

#[derive(Debug)]
struct AttrDecl {
    name: String,
    kind: AttrKind,
    line: usize,
}

fn sanitize(name: &str) -> String {
    name.replace(',', "_")
}

/// True when `line` starts with the ARFF keyword, case-insensitively.
fn keyword<'a>(line: &'a str, word: &str) -> Option<&'a str> {
    if line.len() >= word.len() && line[..word.len()].eq_ignore_ascii_case(word) {
        Some(line[word.len()..].trim())
    } else {
        None
    }
}

fn parse_attribute(rest: &str, line: usize) -> Result<AttrDecl, IngestError> {
    let rest = rest.trim();
    let (name, spec) = if let Some(stripped) = rest.strip_prefix('\'').or(rest.strip_prefix('"')) {
        let quote = rest.chars().next().unwrap();
        let end = stripped
            .find(quote)
            .ok_or_else(|| parse_err(line, "unterminated quoted attribute name"))?;
        (&stripped[..end], stripped[end + 1..].trim())
    } else {
        rest.split_once(char::is_whitespace)
            .map(|(n, s)| (n, s.trim()))
            .ok_or_else(|| parse_err(line, "attribute needs a name and a type"))?
    };
    if name.is_empty() {
        return Err(parse_err(line, "empty attribute name"));
    }
    let kind = if let Some(body) = spec.strip_prefix('{') {
        let body = body
            .strip_suffix('}')
            .ok_or_else(|| parse_err(line, "unterminated nominal value list"))?;
        let levels: Vec<String> = body.split(',').map(|v| sanitize(v.trim())).collect();
        if levels.iter().any(|v| v.is_empty()) {
            return Err(parse_err(line, "empty nominal value"));
        }
        AttrKind::Nominal(levels)
    } else {
        match spec.to_ascii_lowercase().as_str() {
            "numeric" | "real" | "integer" => AttrKind::Numeric,
            other => {
                return Err(parse_err(line, format!("unknown attribute type {:?}", other)))
            }
        }
    };
    Ok(AttrDecl {
        name: sanitize(name),
        kind,
        line,
    })
}

/// Parse the dense ARFF subset: `@relation`, `@attribute` (numeric or
/// nominal), `@data` with comma-separated rows, `%` comments. Rows with a
/// `?` field are dropped and counted. The class attribute is
/// `class_attr` when given, otherwise the last one; it must be nominal.
/// Nominal non-class attributes expand to one-hot columns.
pub fn parse_arff(
    text: &str,
    fallback_name: &str,
    class_attr: Option<&str>,
) -> Result<LoadOutcome, IngestError> {
    let mut relation = sanitize(fallback_name);
    let mut attrs: Vec<AttrDecl> = Vec::new();
    let mut data_rows: Vec<(usize, &str)> = Vec::new();
    let mut in_data = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if in_data {
            data_rows.push((lineno, line));
        } else if let Some(rest) = keyword(line, "@relation") {
            let name = rest.trim_matches(|c| c == '\'' || c == '"');
            if !name.is_empty() {
                relation = sanitize(name);
            }
        } else if let Some(rest) = keyword(line, "@attribute") {
            attrs.push(parse_attribute(rest, lineno)?);
        } else if keyword(line, "@data").is_some() {
            in_data = true;
        } else {
            return Err(parse_err(lineno, format!("unexpected directive {:?}", line)));
        }
    }
    if !in_data {
        return Err(parse_err(text.lines().count(), "missing @data section"));
    }
    if attrs.len() < 2 {
        return Err(parse_err(1, "need at least one feature and a class"));
    }
    let class_idx = match class_attr {
        Some(name) => attrs
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| parse_err(1, format!("no attribute named {:?}", name)))?,
        None => attrs.len() - 1,
    };
    let class_levels = match &attrs[class_idx].kind {
        AttrKind::Nominal(levels) => levels.clone(),
        AttrKind::Numeric => {
            return Err(parse_err(
                attrs[class_idx].line,
                "class attribute must be nominal",
            ))
        }
    };
    let mut class_names = class_levels.clone();
    class_names.sort();
    // column layout of the expanded feature matrix
    let mut feature_names = Vec::new();
    for (a, attr) in attrs.iter().enumerate() {
        if a == class_idx {
            continue;
        }
        match &attr.kind {
            AttrKind::Numeric => feature_names.push(attr.name.clone()),
            AttrKind::Nominal(levels) => {
                for level in levels {
                    feature_names.push(format!("{}={}", attr.name, level));
                }
            }
        }
    }
    let n_cols = feature_names.len();
    if n_cols == 0 {
        return Err(parse_err(1, "no feature attributes"));
    }

    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut dropped = 0usize;
    for (lineno, row) in data_rows {
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != attrs.len() {
            return Err(parse_err(
                lineno,
                format!("expected {} fields, found {}", attrs.len(), fields.len()),
            ));
        }
        if fields.iter().any(|f| *f == "?") {
            dropped += 1;
            continue;
        }
        let start = features.len();
        for (a, attr) in attrs.iter().enumerate() {
            let field = fields[a];
            if a == class_idx {
                let level = sanitize(field);
                let label = class_names
                    .binary_search(&level)
                    .map_err(|_| parse_err(lineno, format!("undeclared class value {:?}", field)))?;
                labels.push(label);
                continue;
            }
            match &attr.kind {
                AttrKind::Numeric => {
                    let v: f64 = field
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("bad number {:?}", field)))?;
                    features.push(v);
                }
                AttrKind::Nominal(levels) => {
                    let level = sanitize(field);
                    let li = levels.iter().position(|l| *l == level).ok_or_else(|| {
                        parse_err(lineno, format!("undeclared value {:?}", field))
                    })?;
                    for j in 0..levels.len() {
                        features.push(if j == li { 1.0 } else { 0.0 });
                    }
                }
            }
        }
        debug_assert_eq!(features.len() - start, n_cols);
    }
    let mut data = Dataset::new(relation, features, n_cols, labels, class_names.len())?;
    data.feature_names = feature_names;
    data.class_names = class_names;
    Ok(LoadOutcome {
        data,
        dropped_rows: dropped,
    })
}

/// Parse headed CSV with the class in the last column. Rows with a `?`
/// field are dropped and counted; class labels are the sorted distinct
/// values of the last column.
pub fn parse_csv(text: &str, name: &str) -> Result<LoadOutcome, IngestError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file"))?;
    let columns: Vec<&str> = header.trim_end_matches('\r').split(',').collect();
    if columns.len() < 2 {
        return Err(parse_err(1, "need at least one feature column and a class column"));
    }
    let n_cols = columns.len() - 1;
    let mut rows: Vec<(usize, Vec<f64>, String)> = Vec::new();
    let mut dropped = 0usize;
    for (i, raw) in lines {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(parse_err(
                i + 1,
                format!("expected {} fields, found {}", columns.len(), fields.len()),
            ));
        }
        if fields.iter().any(|f| *f == "?") {
            dropped += 1;
            continue;
        }
        let mut values = Vec::with_capacity(n_cols);
        for field in &fields[..n_cols] {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(i + 1, format!("bad number {:?}", field)))?;
            values.push(v);
        }
        rows.push((i + 1, values, fields[n_cols].to_string()));
    }
    let mut class_names: Vec<String> = rows.iter().map(|(_, _, c)| c.clone()).collect();
    class_names.sort();
    class_names.dedup();
    let mut features = Vec::with_capacity(rows.len() * n_cols);
    let mut labels = Vec::with_capacity(rows.len());
    for (_, values, class) in &rows {
        features.extend_from_slice(values);
        labels.push(class_names.binary_search(class).unwrap());
    }
    let mut data = Dataset::new(sanitize(name), features, n_cols, labels, class_names.len())?;
    data.feature_names = columns[..n_cols].iter().map(|c| sanitize(c)).collect();
    data.class_names = class_names;
    Ok(LoadOutcome {
        data,
        dropped_rows: dropped,
    })
}

/// Serialize as headed CSV (class last). Reloading with `parse_csv`
/// reproduces features and labels exactly.
pub fn write_csv(data: &Dataset) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    for name in &data.feature_names {
        assert!(!name.contains(','), "feature name {:?} breaks csv", name);
        out.push_str(name);
        out.push(',');
    }
    out.push_str("class\n");
    for i in 0..data.len() {
        // f64 Display is shortest-round-trip, so the values reload exactly
        for v in data.row(i) {
            let _ = write!(out, "{},", v);
        }
        out.push_str(&data.class_names[data.label(i)]);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINI_ARFF: &str = "\
% tiny example
@RELATION mini
@ATTRIBUTE width numeric
@attribute height REAL
@attribute class {yes,no}
@DATA
1.0,2.0,yes
1.5,2.5,no
2.0,3.0,yes
2.5,3.5,no
";

    #[test]
    fn minimal_arff_parses() {
        let out = parse_arff(MINI_ARFF, "fallback", None).unwrap();
        assert_eq!(out.dropped_rows, 0);
        let d = out.data;
        assert_eq!(d.name, "mini");
        assert_eq!((d.len(), d.dims(), d.class_count()), (4, 2, 2));
        // labels follow sorted class names: no=0, yes=1
        assert_eq!(d.class_names, vec!["no", "yes"]);
        assert_eq!(d.labels(), &[1, 0, 1, 0]);
        assert_eq!(d.row(2), &[2.0, 3.0]);
    }

    #[test]
    fn missing_values_drop_rows() {
        let text = MINI_ARFF.replace("1.5,2.5,no", "1.5,?,no");
        let out = parse_arff(&text, "x", None).unwrap();
        assert_eq!(out.dropped_rows, 1);
        assert_eq!(out.data.len(), 3);
    }

    #[test]
    fn nominal_feature_expands_one_hot() {
        let text = "\
@relation oh
@attribute color {red,green,blue}
@attribute class {a,b}
@data
green,a
red,b
blue,a
";
        let d = parse_arff(text, "x", None).unwrap().data;
        assert_eq!(d.dims(), 3);
        assert_eq!(d.feature_names, vec!["color=red", "color=green", "color=blue"]);
        assert_eq!(d.row(0), &[0.0, 1.0, 0.0]);
        assert_eq!(d.row(1), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn named_class_attribute() {
        let text = "\
@relation named
@attribute target {p,q}
@attribute x1 numeric
@data
p,0.5
q,0.7
";
        let d = parse_arff(text, "x", Some("target")).unwrap().data;
        assert_eq!(d.dims(), 1);
        assert_eq!(d.class_names, vec!["p", "q"]);
        assert_eq!(d.row(1), &[0.7]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad_number = MINI_ARFF.replace("2.0,3.0,yes", "2.0,oops,yes");
        match parse_arff(&bad_number, "x", None).unwrap_err() {
            IngestError::Parse { line, .. } => assert_eq!(line, 9),
            other => panic!("unexpected {:?}", other),
        }
        let bad_type = MINI_ARFF.replace("height REAL", "height date");
        match parse_arff(&bad_type, "x", None).unwrap_err() {
            IngestError::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {:?}", other),
        }
        let numeric_class = "\
@relation x
@attribute a numeric
@attribute b numeric
@data
1,2
";
        assert!(parse_arff(numeric_class, "x", None).is_err());
    }

    #[test]
    fn bundled_iris_summary() {
        let out = load_dataset(Path::new(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../datasets/iris.arff"
        )))
        .unwrap();
        let s = out.data.summarize();
        assert_eq!(format!("{}", s), "iris: |S|=150, d=4, C=3, IR=1.00");
        assert_eq!(out.dropped_rows, 0);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let arff = parse_arff(MINI_ARFF, "x", None).unwrap().data;
        let text = write_csv(&arff);
        let back = parse_csv(&text, "mini").unwrap().data;
        assert_eq!(back.labels(), arff.labels());
        assert_eq!(back.class_names, arff.class_names);
        for i in 0..arff.len() {
            assert_eq!(back.row(i), arff.row(i));
        }
        // awkward floats survive the trip bit-for-bit
        let tricky = Dataset::new(
            "t",
            vec![0.30000000000000004, 1e-17, -3.5, 1.0 / 3.0],
            2,
            vec![0, 1],
            2,
        )
        .unwrap();
        let back = parse_csv(&write_csv(&tricky), "t").unwrap().data;
        for i in 0..tricky.len() {
            assert_eq!(back.row(i), tricky.row(i));
        }
    }

    #[test]
    fn csv_missing_and_errors() {
        let text = "x1,x2,class\n1.0,2.0,a\n1.0,?,b\n2.0,3.0,b\n";
        let out = parse_csv(text, "t").unwrap();
        assert_eq!(out.dropped_rows, 1);
        assert_eq!(out.data.len(), 2);
        match parse_csv("x1,class\nnope,a\n1.0,b\n", "t").unwrap_err() {
            IngestError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {:?}", other),
        }
    }
}
