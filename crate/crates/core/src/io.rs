//! File formats: edge-list and signal CSVs, hub labels, JSON output and
//! config files.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::SignalMatrix;

fn parse_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        kind => parse_err(path, format!("{kind:?}")),
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

/// Writes through a sibling temporary file and a rename, so readers never
/// see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    file.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    file.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Shortest decimal form that parses back to the same `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:?}")
}

fn parse_f64(path: &Path, line: usize, field: &str) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_err(path, format!("line {line}: `{field}` is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(path, format!("line {line}: non-finite value `{field}`")));
    }
    Ok(v)
}

fn parse_id(path: &Path, line: usize, field: &str) -> Result<usize> {
    field
        .trim()
        .parse()
        .map_err(|_| parse_err(path, format!("line {line}: `{field}` is not a non-negative integer node id")))
}

/// Reads an edge list with header `src,dst[,weight]`. Missing weights are 1.
/// The node count is `n_nodes` when given, else the largest id plus one.
pub fn read_edge_list(path: &Path, n_nodes: Option<usize>) -> Result<Graph> {
    let bytes = read_bytes(path)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(&bytes[..]);
    let headers = rdr.headers().map_err(csv_err(path))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (src, dst) = match (col("src"), col("dst")) {
        (Some(s), Some(d)) => (s, d),
        _ => return Err(parse_err(path, "header must contain `src,dst` and optionally `weight`")),
    };
    let weight = col("weight");
    let mut edges = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let line = i + 2;
        let field = |c: usize| {
            rec.get(c)
                .ok_or_else(|| parse_err(path, format!("line {line}: missing column {}", c + 1)))
        };
        let s = parse_id(path, line, field(src)?)?;
        let d = parse_id(path, line, field(dst)?)?;
        let w = match weight.and_then(|c| rec.get(c)).filter(|f| !f.is_empty()) {
            Some(f) => parse_f64(path, line, f)?,
            None => 1.0,
        };
        edges.push((s, d, w));
    }
    let inferred = edges.iter().map(|&(s, d, _)| s.max(d) + 1).max().unwrap_or(0);
    let n = n_nodes.unwrap_or(inferred);
    Graph::from_edges(n, &edges)
}

pub fn write_edge_list(path: &Path, g: &Graph) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = csv_err(path);
    w.write_record(["src", "dst", "weight"]).map_err(&io)?;
    for (s, d, wt) in g.edges() {
        w.write_record([s.to_string(), d.to_string(), format_f64(wt)]).map_err(&io)?;
    }
    let bytes = w.into_inner().map_err(|e| parse_err(path, e.to_string()))?;
    write_atomic(path, &bytes)
}

/// Reads an N × P signal matrix. Without `with_node_ids` every line is a
/// data row. With it the first line is a header and column 0 holds the
/// node id of each row; ids must cover `0..N` exactly once.
pub fn read_signals(path: &Path, with_node_ids: bool) -> Result<SignalMatrix> {
    let bytes = read_bytes(path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(with_node_ids)
        .trim(csv::Trim::All)
        .from_reader(&bytes[..]);
    let first_line = if with_node_ids { 2 } else { 1 };
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let line = first_line + i;
        let mut fields = rec.iter();
        let id = if with_node_ids {
            let f = fields.next().ok_or_else(|| parse_err(path, format!("line {line}: empty row")))?;
            parse_id(path, line, f)?
        } else {
            i
        };
        let values = fields.map(|f| parse_f64(path, line, f)).collect::<Result<Vec<_>>>()?;
        rows.push((id, values));
    }
    let n = rows.len();
    if n == 0 {
        return Err(parse_err(path, "no signal rows"));
    }
    let p = rows[0].1.len();
    if p == 0 {
        return Err(parse_err(path, "no signal columns"));
    }
    let mut out = SignalMatrix::zeros(n, p);
    let mut seen = vec![false; n];
    for (id, values) in rows {
        if values.len() != p {
            return Err(parse_err(
                path,
                format!("row for node {id} has {} values, expected {p}", values.len()),
            ));
        }
        if id >= n || seen[id] {
            return Err(parse_err(path, format!("node ids must be 0..{n} each once; got {id}")));
        }
        seen[id] = true;
        for (j, v) in values.into_iter().enumerate() {
            out[(id, j)] = v;
        }
    }
    Ok(out)
}

/// Writes signals without a header, one node per line.
pub fn write_signals(path: &Path, f: &SignalMatrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = csv_err(path);
    for row in f.row_iter() {
        w.write_record(row.iter().map(|&v| format_f64(v))).map_err(&io)?;
    }
    let bytes = w.into_inner().map_err(|e| parse_err(path, e.to_string()))?;
    write_atomic(path, &bytes)
}

/// Reads `node,is_hub` labels (`0`/`1` or `false`/`true`).
pub fn read_labels(path: &Path) -> Result<Vec<bool>> {
    let bytes = read_bytes(path)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(&bytes[..]);
    let mut pairs = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let line = i + 2;
        if rec.len() != 2 {
            return Err(parse_err(path, format!("line {line}: expected `node,is_hub`")));
        }
        let node = parse_id(path, line, &rec[0])?;
        let hub = match rec[1].to_ascii_lowercase().as_str() {
            "1" | "true" => true,
            "0" | "false" => false,
            other => return Err(parse_err(path, format!("line {line}: `{other}` is not 0/1"))),
        };
        pairs.push((node, hub));
    }
    let mut labels = vec![false; pairs.len()];
    let mut seen = vec![false; pairs.len()];
    for (node, hub) in pairs {
        if node >= labels.len() || seen[node] {
            return Err(parse_err(path, format!("node ids must be 0..{} each once; got {node}", labels.len())));
        }
        seen[node] = true;
        labels[node] = hub;
    }
    Ok(labels)
}

pub fn write_labels(path: &Path, labels: &[bool]) -> Result<()> {
    let mut out = String::from("node,is_hub\n");
    for (i, &h) in labels.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", u8::from(h)));
    }
    write_atomic(path, out.as_bytes())
}

/// JSON formatter printing every float with 17 significant digits.
#[derive(Default)]
struct Digits17(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for Digits17 {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        w.write_all(format!("{value:.16e}").as_bytes())
    }

    fn begin_array<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + std::io::Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with 17-significant-digit floats; NaN and infinities become
/// `null`.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17::default());
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, to_json_string(value)?.as_bytes())
}

/// Loads a JSON (`.json`) or TOML (anything else) config file. A run
/// manifest is accepted too: its `config` section is used.
pub fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = read_bytes(path)?;
    let text = String::from_utf8(bytes).map_err(|_| parse_err(path, "config is not UTF-8"))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let value: serde_json::Value = if is_json {
        serde_json::from_str(&text).map_err(|e| parse_err(path, e.to_string()))?
    } else {
        let t: toml::Value = toml::from_str(&text).map_err(|e| parse_err(path, e.to_string()))?;
        serde_json::to_value(t)?
    };
    let value = match value {
        serde_json::Value::Object(mut m) if m.contains_key("subcommand") && m.contains_key("config") => {
            m.remove("config").unwrap_or_default()
        }
        v => v,
    };
    serde_json::from_value(value).map_err(|e| parse_err(path, e.to_string()))
}

/// Lowercase hex SHA-256 of a file's bytes.
pub fn sha256_file(path: &Path) -> Result<String> {
    let digest = Sha256::digest(read_bytes(path)?);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}
