//! Text checkpoint format for [`NetworkSpec`].
//!
//! ```text
//! cvnn-net 1
//! bodies <count>
//! body <in_dim> <out_dim>
//! n <bias re> <bias im> <activation> <nnz> (<col> <re> <im>)*   one line per neuron
//! sequence <len> <body>*
//! bindings <count>
//! bind <name> <slots> (w <body> <row> <entry> | t <body> <neuron>)*
//! end
//! ```
//!
//! Activations are written `thr:<θ>`, `cmp`, `id`, `idx:<k>` or `hot:<l>`.
//! Floats use the shortest representation that parses back to the same bits.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::{ActivationKind, Binding, LayerSpec, NetworkSpec, Slot};
use crate::error::{parse_err, Error, Result};
use crate::io::Lines;

const MAGIC: &str = "cvnn-net";
const VERSION: &str = "1";

fn act_token(a: ActivationKind) -> String {
    match a {
        ActivationKind::ThresholdGate(t) => format!("thr:{t:?}"),
        ActivationKind::CompareGate => "cmp".into(),
        ActivationKind::Identity => "id".into(),
        ActivationKind::IndexGate(k) => format!("idx:{k}"),
        ActivationKind::OneHotGate(l) => format!("hot:{l}"),
    }
}

fn parse_act(tok: &str, line: usize) -> Result<ActivationKind> {
    let bad = || parse_err(line, format!("unknown activation {tok:?}"));
    match tok {
        "cmp" => return Ok(ActivationKind::CompareGate),
        "id" => return Ok(ActivationKind::Identity),
        _ => {}
    }
    let (kind, arg) = tok.split_once(':').ok_or_else(bad)?;
    match kind {
        "thr" => {
            let t: f64 = arg.parse().map_err(|_| bad())?;
            if !t.is_finite() {
                return Err(bad());
            }
            Ok(ActivationKind::ThresholdGate(t))
        }
        "idx" => Ok(ActivationKind::IndexGate(arg.parse().map_err(|_| bad())?)),
        "hot" => Ok(ActivationKind::OneHotGate(arg.parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

/// Serialises `net`; [`parse_checkpoint`] restores it bit for bit.
pub fn write_checkpoint(net: &NetworkSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC} {VERSION}");
    let _ = writeln!(s, "bodies {}", net.bodies().len());
    for l in net.bodies() {
        let _ = writeln!(s, "body {} {}", l.in_dim(), l.out_dim());
        for r in 0..l.out_dim() {
            let b = l.bias()[r];
            let range = l.row_range(r);
            let _ = write!(
                s,
                "n {:?} {:?} {} {}",
                b.re,
                b.im,
                act_token(l.activations()[r]),
                range.len()
            );
            for e in range {
                let w = l.vals()[e];
                let _ = write!(s, " {} {:?} {:?}", l.cols()[e], w.re, w.im);
            }
            s.push('\n');
        }
    }
    let _ = write!(s, "sequence {}", net.sequence().len());
    for b in net.sequence() {
        let _ = write!(s, " {b}");
    }
    s.push('\n');
    let _ = writeln!(s, "bindings {}", net.bindings().len());
    for b in net.bindings() {
        let _ = write!(s, "bind {} {}", b.name, b.slots.len());
        for slot in &b.slots {
            match *slot {
                Slot::Weight { body, row, entry } => {
                    let _ = write!(s, " w {body} {row} {entry}");
                }
                Slot::Threshold { body, neuron } => {
                    let _ = write!(s, " t {body} {neuron}");
                }
            }
        }
        s.push('\n');
    }
    s.push_str("end\n");
    s
}

/// Parses the format written by [`write_checkpoint`].
pub fn parse_checkpoint(text: &str) -> Result<NetworkSpec> {
    let mut lines = Lines::new(text);
    let (ln, head) = lines.next_fields()?;
    if head.first() != Some(&MAGIC) {
        return Err(parse_err(ln, "missing cvnn-net header"));
    }
    if head.len() != 2 {
        return Err(parse_err(ln, "header must be `cvnn-net <version>`"));
    }
    if head[1] != VERSION {
        return Err(Error::Version {
            kind: "network checkpoint",
            version: head[1].to_string(),
        });
    }
    let nbodies = lines.keyed_count("bodies")?;
    let mut bodies = Vec::new();
    for _ in 0..nbodies {
        let (ln, f) = lines.next_fields()?;
        if f.len() != 3 || f[0] != "body" {
            return Err(parse_err(ln, "expected `body <in> <out>`"));
        }
        let in_dim: usize = lines.num(f[1], ln)?;
        let out_dim: usize = lines.num(f[2], ln)?;
        let mut row_ptr = vec![0usize];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut bias = Vec::new();
        let mut acts = Vec::new();
        for _ in 0..out_dim {
            let (ln, f) = lines.next_fields()?;
            if f.len() < 5 || f[0] != "n" {
                return Err(parse_err(ln, "expected neuron line"));
            }
            bias.push(Complex64::new(lines.float(f[1], ln)?, lines.float(f[2], ln)?));
            acts.push(parse_act(f[3], ln)?);
            let nnz: usize = lines.num(f[4], ln)?;
            if nnz.checked_mul(3).and_then(|x| x.checked_add(5)) != Some(f.len()) {
                return Err(parse_err(ln, "neuron entry count does not match"));
            }
            for e in 0..nnz {
                let base = 5 + 3 * e;
                cols.push(lines.num(f[base], ln)?);
                vals.push(Complex64::new(
                    lines.float(f[base + 1], ln)?,
                    lines.float(f[base + 2], ln)?,
                ));
            }
            row_ptr.push(cols.len());
        }
        bodies.push(
            LayerSpec::from_csr(in_dim, row_ptr, cols, vals, bias, acts)
                .map_err(|e| parse_err(ln, e.to_string()))?,
        );
    }
    let (ln, f) = lines.next_fields()?;
    if f.len() < 2 || f[0] != "sequence" {
        return Err(parse_err(ln, "expected `sequence`"));
    }
    let len: usize = lines.num(f[1], ln)?;
    if len.checked_add(2) != Some(f.len()) {
        return Err(parse_err(ln, "sequence length does not match"));
    }
    let sequence = f[2..]
        .iter()
        .map(|t| lines.num(t, ln))
        .collect::<Result<Vec<usize>>>()?;
    let nbind = lines.keyed_count("bindings")?;
    let mut bindings = Vec::new();
    for _ in 0..nbind {
        let (ln, f) = lines.next_fields()?;
        if f.len() < 3 || f[0] != "bind" {
            return Err(parse_err(ln, "expected `bind`"));
        }
        let count: usize = lines.num(f[2], ln)?;
        let mut slots = Vec::new();
        let mut i = 3;
        for _ in 0..count {
            match f.get(i) {
                Some(&"w") => {
                    if f.len() < i + 4 {
                        return Err(parse_err(ln, "truncated weight slot"));
                    }
                    slots.push(Slot::Weight {
                        body: lines.num(f[i + 1], ln)?,
                        row: lines.num(f[i + 2], ln)?,
                        entry: lines.num(f[i + 3], ln)?,
                    });
                    i += 4;
                }
                Some(&"t") => {
                    if f.len() < i + 3 {
                        return Err(parse_err(ln, "truncated threshold slot"));
                    }
                    slots.push(Slot::Threshold {
                        body: lines.num(f[i + 1], ln)?,
                        neuron: lines.num(f[i + 2], ln)?,
                    });
                    i += 3;
                }
                _ => return Err(parse_err(ln, "bad binding slot")),
            }
        }
        if i != f.len() {
            return Err(parse_err(ln, "trailing fields after binding"));
        }
        bindings.push(Binding {
            name: f[1].to_string(),
            slots,
        });
    }
    let (ln, f) = lines.next_fields()?;
    if f != ["end"] {
        return Err(parse_err(ln, "expected `end`"));
    }
    lines.expect_eof()?;
    NetworkSpec::new(bodies, sequence, bindings).map_err(|e| parse_err(ln, e.to_string()))
}
