//! Point clouds to binary little-endian PLY and CSV.

use std::io::{self, BufRead, Write};

use crate::error::{Error, Result};

/// Writes `x y z` as float64, plus an int `piece` property when tags are given.
pub fn write_ply<W: Write>(mut w: W, points: &[[f64; 3]], pieces: Option<&[u32]>) -> io::Result<()> {
    if let Some(t) = pieces {
        if t.len() != points.len() {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, "one piece tag per point"));
        }
    }
    write!(w, "ply\nformat binary_little_endian 1.0\ncomment hypam {}\n", crate::VERSION)?;
    write!(w, "element vertex {}\nproperty double x\nproperty double y\nproperty double z\n", points.len())?;
    if pieces.is_some() {
        writeln!(w, "property int piece")?;
    }
    writeln!(w, "end_header")?;
    for (i, p) in points.iter().enumerate() {
        for x in p {
            w.write_all(&x.to_le_bytes())?;
        }
        if let Some(t) = pieces {
            w.write_all(&(t[i] as i32).to_le_bytes())?;
        }
    }
    w.flush()
}

/// Points with optional piece tags.
pub type TaggedPoints = (Vec<[f64; 3]>, Option<Vec<u32>>);

/// Reads back what [`write_ply`] writes.
pub fn read_ply<R: BufRead>(mut r: R) -> Result<TaggedPoints> {
    let bad = |s: &str| Error::Invalid(format!("ply: {s}"));
    let mut count = None;
    let mut props = Vec::new();
    let mut line = String::new();
    let mut first = true;
    loop {
        line.clear();
        if r.read_line(&mut line).map_err(|e| bad(&e.to_string()))? == 0 {
            return Err(bad("missing end_header"));
        }
        let l = line.trim_end();
        if first {
            if l != "ply" {
                return Err(bad("missing magic"));
            }
            first = false;
            continue;
        }
        let words: Vec<&str> = l.split_whitespace().collect();
        match words.as_slice() {
            ["end_header"] => break,
            ["format", f, _] if *f != "binary_little_endian" => return Err(bad("only binary_little_endian is supported")),
            ["element", "vertex", n] => count = Some(n.parse::<usize>().map_err(|_| bad("bad vertex count"))?),
            ["property", ty, name] => props.push((ty.to_string(), name.to_string())),
            _ => {}
        }
    }
    let n = count.ok_or_else(|| bad("no vertex element"))?;
    let xyz = props.len() >= 3 && props[..3].iter().zip(["x", "y", "z"]).all(|((t, n), w)| t == "double" && n == w);
    let tagged = match props.len() {
        3 => false,
        4 if props[3] == ("int".to_string(), "piece".to_string()) => true,
        _ => return Err(bad("unexpected vertex properties")),
    };
    if !xyz {
        return Err(bad("expected double x, y, z"));
    }
    let mut pts = Vec::with_capacity(n);
    let mut tags = Vec::new();
    let mut b8 = [0u8; 8];
    let mut b4 = [0u8; 4];
    for _ in 0..n {
        let mut p = [0.0; 3];
        for x in &mut p {
            r.read_exact(&mut b8).map_err(|_| bad("truncated body"))?;
            *x = f64::from_le_bytes(b8);
        }
        pts.push(p);
        if tagged {
            r.read_exact(&mut b4).map_err(|_| bad("truncated body"))?;
            tags.push(i32::from_le_bytes(b4) as u32);
        }
    }
    Ok((pts, tagged.then_some(tags)))
}

/// `x,y,z[,piece]` with a header row; floats in shortest round-trip form.
pub fn write_csv<W: Write>(mut w: W, points: &[[f64; 3]], pieces: Option<&[u32]>) -> io::Result<()> {
    writeln!(w, "{}", if pieces.is_some() { "x,y,z,piece" } else { "x,y,z" })?;
    for (i, p) in points.iter().enumerate() {
        match pieces {
            Some(t) => writeln!(w, "{},{},{},{}", p[0], p[1], p[2], t[i])?,
            None => writeln!(w, "{},{},{}", p[0], p[1], p[2])?,
        }
    }
    w.flush()
}
