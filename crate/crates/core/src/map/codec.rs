//! Stream formats: `planar_code`, `edge_code` and the line-oriented
//! `lopsp_text`.

use std::fmt::Write as _;

use thiserror::Error;

use super::{theta, Dart, PlaneMap, Vertex};

pub const PLANAR_CODE_HEADER: &[u8] = b">>planar_code<<";
pub const EDGE_CODE_HEADER: &[u8] = b">>edge_code<<";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    PlanarCode,
    EdgeCode,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "planar_code" | "planar" => Ok(Format::PlanarCode),
            "edge_code" | "edge" => Ok(Format::EdgeCode),
            _ => Err(format!("unknown map format `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("unknown header")]
    UnknownHeader,
    #[error("truncated record at byte {0}")]
    TruncatedRecord(usize),
    #[error("inconsistent rotation in record at byte {0}")]
    InconsistentRotation(usize),
    #[error("planar_code cannot carry loops")]
    Loops,
    #[error("map too large for edge_code ({0} edges)")]
    TooLarge(usize),
    #[error("lopsp_text line {0}: {1}")]
    Text(usize, String),
}

/// Encodes maps into one stream, header included.
pub fn encode(maps: &[PlaneMap], format: Format) -> Result<Vec<u8>, CodecError> {
    let mut out = match format {
        Format::PlanarCode => PLANAR_CODE_HEADER.to_vec(),
        Format::EdgeCode => EDGE_CODE_HEADER.to_vec(),
    };
    for m in maps {
        match format {
            Format::PlanarCode => encode_planar_code(m, &mut out)?,
            Format::EdgeCode => encode_edge_code(m, &mut out)?,
        }
    }
    Ok(out)
}

/// Decodes a stream produced by [`encode`]; the header selects the format
/// and must match `format`.
pub fn decode(bytes: &[u8], format: Format) -> Result<Vec<PlaneMap>, CodecError> {
    let header = match format {
        Format::PlanarCode => PLANAR_CODE_HEADER,
        Format::EdgeCode => EDGE_CODE_HEADER,
    };
    if !bytes.starts_with(header) {
        return Err(CodecError::UnknownHeader);
    }
    let mut pos = header.len();
    let mut maps = Vec::new();
    while pos < bytes.len() {
        let m = match format {
            Format::PlanarCode => decode_planar_code(bytes, &mut pos)?,
            Format::EdgeCode => decode_edge_code(bytes, &mut pos)?,
        };
        maps.push(m);
    }
    Ok(maps)
}

/// Detects the stream format from its header.
pub fn sniff(bytes: &[u8]) -> Result<Format, CodecError> {
    if bytes.starts_with(PLANAR_CODE_HEADER) {
        Ok(Format::PlanarCode)
    } else if bytes.starts_with(EDGE_CODE_HEADER) {
        Ok(Format::EdgeCode)
    } else {
        Err(CodecError::UnknownHeader)
    }
}

pub fn encode_planar_code(m: &PlaneMap, out: &mut Vec<u8>) -> Result<(), CodecError> {
    let n = m.vertex_count();
    if (0..m.edge_count()).any(|e| m.tail(2 * e) == m.head(2 * e)) {
        return Err(CodecError::Loops);
    }
    let wide = n >= 255;
    let put = |out: &mut Vec<u8>, x: usize| {
        if wide {
            out.extend_from_slice(&(x as u16).to_le_bytes());
        } else {
            out.push(x as u8);
        }
    };
    if wide {
        out.push(0);
        out.extend_from_slice(&(n as u16).to_le_bytes());
    } else {
        out.push(n as u8);
    }
    for v in 0..n {
        for d in m.darts_at(v) {
            put(out, m.head(d) + 1);
        }
        put(out, 0);
    }
    Ok(())
}

fn decode_planar_code(bytes: &[u8], pos: &mut usize) -> Result<PlaneMap, CodecError> {
    let start = *pos;
    let take = |pos: &mut usize, w: usize| -> Result<usize, CodecError> {
        if *pos + w > bytes.len() {
            return Err(CodecError::TruncatedRecord(start));
        }
        let x = if w == 1 {
            bytes[*pos] as usize
        } else {
            u16::from_le_bytes([bytes[*pos], bytes[*pos + 1]]) as usize
        };
        *pos += w;
        Ok(x)
    };
    let mut n = take(pos, 1)?;
    let width = if n == 0 {
        n = take(pos, 2)?;
        2
    } else {
        1
    };
    let mut lists: Vec<Vec<Vertex>> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut list = Vec::new();
        loop {
            let x = take(pos, width)?;
            if x == 0 {
                break;
            }
            if x > n {
                return Err(CodecError::InconsistentRotation(start));
            }
            list.push(x - 1);
        }
        lists.push(list);
    }
    rotation_from_neighbour_lists(&lists).ok_or(CodecError::InconsistentRotation(start))
}

/// Rebuilds a plane rotation system from neighbour lists. Parallel edges
/// are ambiguous in this form; darts of a parallel class are paired in
/// reverse cyclic order, trying every cyclic offset until the result is
/// plane.
pub fn rotation_from_neighbour_lists(lists: &[Vec<Vertex>]) -> Option<PlaneMap> {
    use std::collections::BTreeMap;
    let n = lists.len();
    // Global slot ids: (vertex, index) -> slot.
    let mut slot_base = Vec::with_capacity(n);
    let mut total = 0;
    for l in lists {
        slot_base.push(total);
        total += l.len();
    }
    let mut classes: BTreeMap<(Vertex, Vertex), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (u, l) in lists.iter().enumerate() {
        for (i, &v) in l.iter().enumerate() {
            if u == v || v >= n {
                return None;
            }
            let key = (u.min(v), u.max(v));
            let entry = classes.entry(key).or_default();
            if u < v {
                entry.0.push(slot_base[u] + i);
            } else {
                entry.1.push(slot_base[u] + i);
            }
        }
    }
    let classes: Vec<(Vec<usize>, Vec<usize>)> = classes.into_values().collect();
    if classes.iter().any(|(a, b)| a.len() != b.len()) {
        return None;
    }
    let build = |shifts: &[usize]| -> Option<PlaneMap> {
        let mut dart_of_slot = vec![0; total];
        let mut e = 0;
        for ((a, b), &s) in classes.iter().zip(shifts) {
            let k = a.len();
            for i in 0..k {
                dart_of_slot[a[i]] = 2 * e;
                dart_of_slot[b[(s + k - i) % k]] = 2 * e + 1;
                e += 1;
            }
        }
        let rot: Vec<Vec<Dart>> = (0..n)
            .map(|u| {
                (0..lists[u].len())
                    .map(|i| dart_of_slot[slot_base[u] + i])
                    .collect()
            })
            .collect();
        PlaneMap::from_rotation(n, &rot).ok()
    };
    let mut shifts: Vec<usize> = classes
        .iter()
        .map(|(a, _)| a.len().saturating_sub(1))
        .collect();
    let multi: Vec<usize> = (0..classes.len())
        .filter(|&i| classes[i].0.len() > 1)
        .collect();
    // Odometer over the cyclic offsets of the parallel classes.
    loop {
        if let Some(m) = build(&shifts) {
            return Some(m);
        }
        let mut i = 0;
        loop {
            if i == multi.len() {
                return None;
            }
            let c = multi[i];
            shifts[c] = (shifts[c] + 1) % classes[c].0.len();
            if shifts[c] != classes[c].0.len() - 1 {
                break;
            }
            i += 1;
        }
    }
}

pub fn encode_edge_code(m: &PlaneMap, out: &mut Vec<u8>) -> Result<(), CodecError> {
    if m.edge_count() >= 255 {
        return Err(CodecError::TooLarge(m.edge_count()));
    }
    let mut body = Vec::new();
    for v in 0..m.vertex_count() {
        if v > 0 {
            body.push(255);
        }
        for d in m.darts_at(v) {
            body.push((d / 2) as u8);
        }
    }
    if body.len() >= 255 {
        out.push(255);
        out.extend_from_slice(&(body.len() as u32).to_le_bytes());
    } else {
        out.push(body.len() as u8);
    }
    out.extend_from_slice(&body);
    Ok(())
}

fn decode_edge_code(bytes: &[u8], pos: &mut usize) -> Result<PlaneMap, CodecError> {
    let start = *pos;
    let mut len = bytes[*pos] as usize;
    *pos += 1;
    if len == 255 {
        if *pos + 4 > bytes.len() {
            return Err(CodecError::TruncatedRecord(start));
        }
        len = u32::from_le_bytes(bytes[*pos..*pos + 4].try_into().unwrap()) as usize;
        *pos += 4;
    }
    if *pos + len > bytes.len() {
        return Err(CodecError::TruncatedRecord(start));
    }
    let body = &bytes[*pos..*pos + len];
    *pos += len;
    let mut rot: Vec<Vec<Dart>> = vec![Vec::new()];
    let edge_count = body.iter().filter(|&&b| b != 255).count() / 2;
    let mut seen = vec![0u8; edge_count];
    for &b in body {
        if b == 255 {
            rot.push(Vec::new());
            continue;
        }
        let e = b as usize;
        if e >= edge_count || seen[e] == 2 {
            return Err(CodecError::InconsistentRotation(start));
        }
        rot.last_mut().unwrap().push(2 * e + seen[e] as usize);
        seen[e] += 1;
    }
    if seen.iter().any(|&s| s != 2) {
        return Err(CodecError::InconsistentRotation(start));
    }
    PlaneMap::from_rotation(rot.len(), &rot).map_err(|_| CodecError::InconsistentRotation(start))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    Lopsp { k: usize },
    Predeco { v1_colour1: bool },
}

/// One `lopsp_text` record: a coloured map with three marked vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LopspRecord {
    pub kind: RecordKind,
    pub map: PlaneMap,
    pub colour: Vec<u8>,
    pub marks: [Vertex; 3],
    pub comments: Vec<String>,
}

impl LopspRecord {
    pub fn write(&self, out: &mut String) {
        match self.kind {
            RecordKind::Lopsp { k } => writeln!(out, "lopsp k={k}").unwrap(),
            RecordKind::Predeco { v1_colour1 } => {
                writeln!(out, "predeco v1c1={}", v1_colour1 as u8).unwrap()
            }
        }
        writeln!(out, "vertices {}", self.map.vertex_count()).unwrap();
        for v in 0..self.map.vertex_count() {
            let rot: Vec<String> = self.map.darts_at(v).map(|d| d.to_string()).collect();
            writeln!(out, "v{v} c={} rot={}", self.colour[v], rot.join(",")).unwrap();
        }
        let [a, b, c] = self.marks;
        writeln!(out, "marks v0={a} v1={b} v2={c}").unwrap();
        for c in &self.comments {
            writeln!(out, "# {c}").unwrap();
        }
        out.push('\n');
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        self.write(&mut s);
        s
    }
}

pub fn write_lopsp_text(records: &[LopspRecord]) -> String {
    let mut s = String::new();
    for r in records {
        r.write(&mut s);
    }
    s
}

pub fn read_lopsp_text(text: &str) -> Result<Vec<LopspRecord>, CodecError> {
    let mut records = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    let err = |i: usize, msg: &str| CodecError::Text(i + 1, msg.to_string());
    loop {
        while matches!(lines.peek(), Some((_, l)) if l.trim().is_empty()) {
            lines.next();
        }
        let Some((i, head)) = lines.next() else { break };
        let kind = if let Some(k) = head.strip_prefix("lopsp k=") {
            RecordKind::Lopsp {
                k: k.trim().parse().map_err(|_| err(i, "bad k"))?,
            }
        } else if let Some(b) = head.strip_prefix("predeco v1c1=") {
            RecordKind::Predeco {
                v1_colour1: b.trim() == "1",
            }
        } else {
            return Err(err(i, "expected `lopsp` or `predeco` header"));
        };
        let (i, vl) = lines
            .next()
            .ok_or_else(|| err(i, "missing vertices line"))?;
        let n: usize = vl
            .strip_prefix("vertices ")
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| err(i, "bad vertices line"))?;
        let mut colour = vec![0u8; n];
        let mut rot = vec![Vec::new(); n];
        for v in 0..n {
            let (i, l) = lines.next().ok_or_else(|| err(i, "missing vertex line"))?;
            let mut parts = l.split_whitespace();
            let id: usize = parts
                .next()
                .and_then(|p| p.strip_prefix('v'))
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| err(i, "bad vertex id"))?;
            if id != v {
                return Err(err(i, "vertex ids must be in order"));
            }
            for p in parts {
                if let Some(c) = p.strip_prefix("c=") {
                    colour[v] = c.parse().map_err(|_| err(i, "bad colour"))?;
                } else if let Some(r) = p.strip_prefix("rot=") {
                    rot[v] = r
                        .split(',')
                        .filter(|x| !x.is_empty())
                        .map(|x| x.parse::<Dart>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| err(i, "bad rotation"))?;
                }
            }
        }
        let (i, ml) = lines.next().ok_or_else(|| err(i, "missing marks line"))?;
        let mut marks = [0; 3];
        let rest = ml
            .strip_prefix("marks ")
            .ok_or_else(|| err(i, "bad marks line"))?;
        for (k, p) in rest.split_whitespace().enumerate().take(3) {
            let (_, x) = p.split_once('=').ok_or_else(|| err(i, "bad mark"))?;
            marks[k] = x.parse().map_err(|_| err(i, "bad mark"))?;
        }
        let mut comments = Vec::new();
        while let Some((_, l)) = lines.peek() {
            if let Some(c) = l.strip_prefix('#') {
                comments.push(c.trim().to_string());
                lines.next();
            } else {
                break;
            }
        }
        let map = PlaneMap::from_rotation(n, &rot).map_err(|e| err(i, &e.to_string()))?;
        if marks.iter().any(|&x| x >= n) {
            return Err(err(i, "mark out of range"));
        }
        records.push(LopspRecord {
            kind,
            map,
            colour,
            marks,
            comments,
        });
    }
    Ok(records)
}

/// Convenience: whether a dart pairing is consistent (used in tests).
#[allow(dead_code)]
pub(crate) fn pairing_ok(m: &PlaneMap) -> bool {
    (0..m.dart_count()).all(|d| theta(theta(d)) == d)
}
