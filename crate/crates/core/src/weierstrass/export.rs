//! Mesh and table export of sampled surfaces.

use std::fmt::Write as _;

use super::WeierstrassSample;
use crate::error::check_dim;
use crate::Result;

/// Wavefront OBJ: one vertex per node, two triangles per grid cell. Cells
/// wrap around the periodic direction of annuli.
pub fn to_obj(s: &WeierstrassSample) -> Result<String> {
    check_dim(3, s.dim())?;
    let d = &s.domain;
    let mut out = String::new();
    for p in &s.f {
        let _ = writeln!(out, "v {:.17e} {:.17e} {:.17e}", p[0], p[1], p[2]);
    }
    let cols = if d.periodic() { d.nv } else { d.nv - 1 };
    for i in 0..d.nu - 1 {
        for j in 0..cols {
            let j1 = (j + 1) % d.nv;
            // OBJ indices are 1-based
            let a = d.index(i, j) + 1;
            let b = d.index(i + 1, j) + 1;
            let c = d.index(i + 1, j1) + 1;
            let e = d.index(i, j1) + 1;
            let _ = writeln!(out, "f {a} {b} {c}");
            let _ = writeln!(out, "f {a} {c} {e}");
        }
    }
    Ok(out)
}

/// CSV with header `u,v,x1,…,xn`; `(u, v)` are chart coordinates.
pub fn to_csv(s: &WeierstrassSample) -> String {
    let d = &s.domain;
    let mut out = String::from("u,v");
    for k in 1..=s.dim() {
        let _ = write!(out, ",x{k}");
    }
    out.push('\n');
    for i in 0..d.nu {
        for j in 0..d.nv {
            let w = d.chart_point(i, j);
            let _ = write!(out, "{:.17e},{:.17e}", w.re, w.im);
            for v in s.f[d.index(i, j)].iter() {
                let _ = write!(out, ",{v:.17e}");
            }
            out.push('\n');
        }
    }
    out
}
