//! Canonical droplets: regular hexagons, bars, quasi-regular hexagons and
//! standard polyiamonds, with their closed-form energies.
//!
//! Conventions (frozen so canonical shapes are unique):
//!
//! * `E(r)` is the hexagon of radius `r` centred on the origin vertex.
//! * The six sides are numbered clockwise from the top by their constraint:
//!   `j ≤ r`, `i+j ≤ r`, `i ≤ r`, `−j ≤ r`, `−i−j ≤ r`, `−i ≤ r`.
//!   `E_{B_m}(r)` relaxes the first `m` of them to `r + 1`, so bar `B_m` is
//!   the strip added on side `m` and `E_{B_6}(r) = E(r+1)`.
//! * Bars are filled starting at the end adjacent to the previous side,
//!   alternating base-touching and outer triangles.
//! * For `r = 0` the six triangles of `E(1)` are added clockwise around the
//!   origin starting from the top-left one.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::energy::{critical_quantities, regular_hexagon_energy, Energy, Params};
use crate::error::{Error, Result};
use crate::hexlattice::{wedge_face, FaceCoord, HexLattice, Symmetry};

/// Outward normal angle (degrees) of each side, in clockwise order from the top.
pub(crate) const SIDE_NORMALS: [f64; 6] = [90.0, 30.0, -30.0, -90.0, -150.0, 150.0];

/// Half-plane bounds of a convex lattice hexagon, in clockwise side order
/// `[j, i+j, i, −j, −i−j, −i]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HexBounds(pub [i32; 6]);

impl HexBounds {
    pub fn regular(r: i32) -> HexBounds {
        HexBounds([r; 6])
    }

    pub fn contains_vertex(&self, (i, j): (i32, i32)) -> bool {
        let c = self.0;
        j <= c[0] && i + j <= c[1] && i <= c[2] && -j <= c[3] && -i - j <= c[4] && -i <= c[5]
    }

    pub fn contains(&self, f: &FaceCoord) -> bool {
        f.vertices().iter().all(|&v| self.contains_vertex(v))
    }

    pub fn faces(&self) -> Vec<FaceCoord> {
        let m = self.0.iter().map(|c| c.abs()).max().unwrap_or(0) + 2;
        let mut out = Vec::new();
        for b in -m..=m {
            for a in -m..=m {
                for f in [FaceCoord::up(a, b), FaceCoord::down(a, b)] {
                    if self.contains(&f) {
                        out.push(f);
                    }
                }
            }
        }
        out
    }
}

/// Bounds of the quasi-regular hexagon E_{B_i}(r).
pub fn quasi_regular_bounds(r: i32, i: usize) -> HexBounds {
    let mut c = [r; 6];
    for slot in c.iter_mut().take(i.min(6)) {
        *slot = r + 1;
    }
    HexBounds(c)
}

pub fn regular_faces(r: u32) -> Vec<FaceCoord> {
    HexBounds::regular(r as i32).faces()
}

pub fn quasi_regular_faces(r: u32, i: usize) -> Vec<FaceCoord> {
    assert!(i <= 6, "at most six bars");
    quasi_regular_bounds(r as i32, i).faces()
}

/// Cardinality of bar `B_m` on `E(r)`: 2r−1 for m = 1, 2r+1 for m = 2..5, 2r+3 for m = 6.
pub fn bar_size(r: u32, m: usize) -> usize {
    if r == 0 {
        return 6;
    }
    let r = r as usize;
    match m {
        1 => 2 * r - 1,
        2..=5 => 2 * r + 1,
        6 => 2 * r + 3,
        _ => panic!("bar index {m} out of range"),
    }
}

/// ‖E_{B_i}(r)‖.
pub fn quasi_regular_area(r: u32, i: usize) -> usize {
    let base = 6 * (r as usize) * (r as usize);
    if r == 0 {
        return if i == 0 { 0 } else { 6 };
    }
    base + (1..=i).map(|m| bar_size(r, m)).sum::<usize>()
}

/// The faces of bar `B_m` on `E_{B_{m−1}}(r)` in filling order.
pub fn bar_faces(r: u32, m: usize) -> Vec<FaceCoord> {
    assert!((1..=6).contains(&m), "bar index {m} out of range");
    if r == 0 {
        // Wedge 2 is the top-left triangle; clockwise means decreasing wedge index.
        return (0..6).map(|k| wedge_face((0, 0), (2 + 6 - k) % 6)).collect();
    }
    let inner: HashSet<FaceCoord> = quasi_regular_faces(r, m - 1).into_iter().collect();
    let mut bar: Vec<FaceCoord> = quasi_regular_faces(r, m).into_iter().filter(|f| !inner.contains(f)).collect();
    let theta = (SIDE_NORMALS[m - 1] - 90.0).to_radians();
    let (tx, ty) = (theta.cos(), theta.sin());
    bar.sort_by(|f, g| {
        let (fx, fy) = f.centroid();
        let (gx, gy) = g.centroid();
        (fx * tx + fy * ty).total_cmp(&(gx * tx + gy * ty))
    });
    bar
}

/// Greedy area decomposition `A = ‖E_{B_i}(r)‖ + k` with `0 ≤ k < ‖B_{i+1}‖`,
/// maximising `r` and then `i`.
pub fn decompose_area(area: usize) -> (u32, usize, usize) {
    let mut r = 0u32;
    while 6 * ((r + 1) as usize).pow(2) <= area {
        r += 1;
    }
    if r == 0 {
        return (0, 0, area);
    }
    let mut i = 0;
    while i < 5 && quasi_regular_area(r, i + 1) <= area {
        i += 1;
    }
    (r, i, area - quasi_regular_area(r, i))
}

/// The standard polyiamond S(A).
pub fn standard_faces(area: usize) -> Vec<FaceCoord> {
    let (r, i, k) = decompose_area(area);
    let mut faces = if r == 0 { Vec::new() } else { quasi_regular_faces(r, i) };
    faces.extend(bar_faces(r, i + 1).into_iter().take(k));
    faces
}

fn protocritical_base(area: usize, what: &str) -> Result<(u32, usize)> {
    let (r, i, k) = decompose_area(area);
    if r == 0 || k != 2 {
        return Err(Error::Placement(format!(
            "{what}({area}) needs a quasi-regular hexagon plus exactly two triangles, got r={r}, i={i}, k={k}"
        )));
    }
    Ok((r, i))
}

/// S̃(A): a quasi-regular hexagon with an elementary rhombus on a longest side.
pub fn s_tilde_faces(area: usize) -> Result<Vec<FaceCoord>> {
    protocritical_base(area, "S~")?;
    Ok(standard_faces(area))
}

/// D̃(A): a quasi-regular hexagon with two triangles on a longest side,
/// touching it along an edge each and separated by one empty triangle.
pub fn d_tilde_faces(area: usize) -> Result<Vec<FaceCoord>> {
    let (r, i) = protocritical_base(area, "D~")?;
    let mut faces = quasi_regular_faces(r, i);
    let bar = bar_faces(r, i + 1);
    faces.push(bar[0]);
    faces.push(bar[2]);
    Ok(faces)
}

/// A free-standing bar of base `l`: `l` up triangles and `l − 1` down triangles.
pub fn bar_shape(l: u32) -> Vec<FaceCoord> {
    incomplete_bar_shape(l, 2 * l as usize - 1)
}

/// The first `k` triangles of a bar of base `l`, grown from one end.
pub fn incomplete_bar_shape(l: u32, k: usize) -> Vec<FaceCoord> {
    let l = l as i32;
    let mut out = Vec::new();
    for a in 0..l {
        out.push(FaceCoord::up(a, 0));
        if a + 1 < l {
            out.push(FaceCoord::down(a, 0));
        }
    }
    out.truncate(k);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShapeKind {
    Regular(u32),
    QuasiRegular(u32, usize),
    Standard(usize),
    STilde(usize),
    DTilde(usize),
    Bar(u32),
    IncompleteBar(u32, usize),
}

impl ShapeKind {
    pub fn faces(&self) -> Result<Vec<FaceCoord>> {
        Ok(match *self {
            ShapeKind::Regular(r) => regular_faces(r),
            ShapeKind::QuasiRegular(r, i) => {
                if i > 6 {
                    return Err(Error::Parse {
                        what: "bar count",
                        input: i.to_string(),
                    });
                }
                quasi_regular_faces(r, i)
            }
            ShapeKind::Standard(a) => standard_faces(a),
            ShapeKind::STilde(a) => s_tilde_faces(a)?,
            ShapeKind::DTilde(a) => d_tilde_faces(a)?,
            ShapeKind::Bar(l) => bar_shape(l),
            ShapeKind::IncompleteBar(l, k) => {
                if k > 2 * l as usize - 1 {
                    return Err(Error::Parse {
                        what: "incomplete bar",
                        input: format!("IB({l},{k})"),
                    });
                }
                incomplete_bar_shape(l, k)
            }
        })
    }
}

/// Where a shape is put: a lattice symmetry about the origin, then a translation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub symmetry: Symmetry,
    pub offset: (i32, i32),
}

impl Default for Placement {
    fn default() -> Self {
        Placement {
            symmetry: Symmetry::IDENTITY,
            offset: (0, 0),
        }
    }
}

impl Placement {
    pub fn apply(&self, f: &FaceCoord) -> FaceCoord {
        f.transform(self.symmetry).translate(self.offset.0, self.offset.1)
    }
}

/// A shape together with its placement. Parses from strings such as
/// `E(2)`, `EB(1,5)`, `S(21)`, `St(21)`, `Dt(21)`, `B(3)`, `IB(3,2)`, with an
/// optional suffix `@rot` (0..5), `m` (reflect) and `+di,dj` (translation),
/// e.g. `EB(1,4)@2m+1,-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    pub placement: Placement,
}

impl ShapeSpec {
    pub fn new(kind: ShapeKind) -> ShapeSpec {
        ShapeSpec {
            kind,
            placement: Placement::default(),
        }
    }

    pub fn faces(&self) -> Result<Vec<FaceCoord>> {
        Ok(self.kind.faces()?.iter().map(|f| self.placement.apply(f)).collect())
    }
}

impl fmt::Display for ShapeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ShapeKind::Regular(r) => write!(f, "E({r})")?,
            ShapeKind::QuasiRegular(r, i) => write!(f, "EB({r},{i})")?,
            ShapeKind::Standard(a) => write!(f, "S({a})")?,
            ShapeKind::STilde(a) => write!(f, "St({a})")?,
            ShapeKind::DTilde(a) => write!(f, "Dt({a})")?,
            ShapeKind::Bar(l) => write!(f, "B({l})")?,
            ShapeKind::IncompleteBar(l, k) => write!(f, "IB({l},{k})")?,
        }
        let p = self.placement;
        if p.symmetry.rot != 0 || p.symmetry.reflect {
            write!(f, "@{}", p.symmetry.rot)?;
            if p.symmetry.reflect {
                write!(f, "m")?;
            }
        }
        if p.offset != (0, 0) {
            write!(f, "+{},{}", p.offset.0, p.offset.1)?;
        }
        Ok(())
    }
}

impl FromStr for ShapeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<ShapeSpec> {
        let bad = || Error::Parse {
            what: "shape",
            input: s.to_string(),
        };
        let s = s.trim();
        let open = s.find('(').ok_or_else(bad)?;
        let close = s.find(')').ok_or_else(bad)?;
        let name = &s[..open];
        let args: Vec<usize> = s[open + 1..close]
            .split(',')
            .map(|a| a.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let one = |args: &[usize]| if args.len() == 1 { Ok(args[0]) } else { Err(bad()) };
        let two = |args: &[usize]| if args.len() == 2 { Ok((args[0], args[1])) } else { Err(bad()) };
        let kind = match name {
            "E" => ShapeKind::Regular(one(&args)? as u32),
            "EB" => {
                let (r, i) = two(&args)?;
                if i > 6 {
                    return Err(bad());
                }
                ShapeKind::QuasiRegular(r as u32, i)
            }
            "S" => ShapeKind::Standard(one(&args)?),
            "St" => ShapeKind::STilde(one(&args)?),
            "Dt" => ShapeKind::DTilde(one(&args)?),
            "B" => ShapeKind::Bar(one(&args)? as u32),
            "IB" => {
                let (l, k) = two(&args)?;
                ShapeKind::IncompleteBar(l as u32, k)
            }
            _ => return Err(bad()),
        };
        let mut rest = &s[close + 1..];
        let mut placement = Placement::default();
        if let Some(r) = rest.strip_prefix('@') {
            let digits = r.chars().take_while(|c| c.is_ascii_digit()).count();
            let rot: u8 = r[..digits].parse().map_err(|_| bad())?;
            if rot > 5 {
                return Err(bad());
            }
            placement.symmetry.rot = rot;
            rest = &r[digits..];
            if let Some(r) = rest.strip_prefix('m') {
                placement.symmetry.reflect = true;
                rest = r;
            }
        }
        if let Some(r) = rest.strip_prefix('+') {
            let (di, dj) = r.split_once(',').ok_or_else(bad)?;
            placement.offset = (di.trim().parse().map_err(|_| bad())?, dj.trim().parse().map_err(|_| bad())?);
            rest = "";
        }
        if !rest.is_empty() {
            return Err(bad());
        }
        Ok(ShapeSpec { kind, placement })
    }
}

/// Places a shape on the lattice; every face must lie in Λ⁻.
pub fn build_shape(spec: &ShapeSpec, lat: &HexLattice) -> Result<Configuration> {
    place_faces(&spec.faces()?, lat).map_err(|_| Error::Placement(format!("{spec} does not fit in radius {}", lat.radius())))
}

/// Configuration occupying exactly the given faces, all of which must be in Λ⁻.
pub fn place_faces(faces: &[FaceCoord], lat: &HexLattice) -> Result<Configuration> {
    let mut c = Configuration::empty(lat);
    for f in faces {
        match lat.site(f) {
            Some(s) if lat.is_interior(s) => c.set(s, true),
            _ => return Err(Error::Placement(format!("face {f:?} lies outside the interior hexagon"))),
        }
    }
    Ok(c)
}

/// H(E_{B_i}(r)) from bar increments: each full bar of base l adds 2l−1
/// particles and 3l−2 bonds.
pub fn quasi_regular_energy(r: u32, i: usize, p: &Params) -> Energy {
    if r == 0 {
        return if i == 0 { 0 } else { regular_hexagon_energy(1, p) };
    }
    let mut h = regular_hexagon_energy(r as i64, p);
    for m in 1..=i {
        let size = bar_size(r, m) as i64;
        let l = (size + 1) / 2;
        h += size * p.delta - (3 * l - 2) * p.u;
    }
    h
}

/// Energy added by the first `k` triangles of an incomplete bar: Δ−U for the
/// first and every even one, Δ−2U for every later odd one.
pub fn incomplete_bar_energy(k: usize, p: &Params) -> Energy {
    if k == 0 {
        return 0;
    }
    let k = k as i64;
    k * p.delta - (k + (k - 1) / 2) * p.u
}

/// H(S(A)) in closed form.
pub fn closed_form_energy(area: usize, p: &Params) -> Energy {
    let (r, i, k) = decompose_area(area);
    if r == 0 {
        // a chain of k triangles around the origin
        let k = k as i64;
        return if k == 0 { 0 } else { k * p.delta - (k - 1) * p.u };
    }
    quasi_regular_energy(r, i, p) + incomplete_bar_energy(k, p)
}

/// The six standard droplets `E_{B_n}(r)` plus an elementary rhombus,
/// n = 0..=5, as `(area, H)` pairs evaluated from their printed closed forms.
pub fn energie_table(r: u32, p: &Params) -> Vec<(usize, Energy)> {
    let ri = r as i64;
    let base = regular_hexagon_energy(ri, p);
    let rows: [(i64, Energy); 6] = [
        (6 * ri * ri + 2, base + 2 * (p.delta - p.u)),
        (6 * ri * ri + 2 * ri + 1, base + (2 * ri + 1) * p.delta - 3 * ri * p.u),
        (6 * ri * ri + 4 * ri + 2, base + 2 * (2 * ri + 1) * p.delta - (6 * ri + 1) * p.u),
        (6 * ri * ri + 6 * ri + 3, base + 3 * (2 * ri + 1) * p.delta - (9 * ri + 2) * p.u),
        (6 * ri * ri + 8 * ri + 4, base + 4 * (2 * ri + 1) * p.delta - (12 * ri + 3) * p.u),
        (6 * ri * ri + 10 * ri + 5, base + 5 * (2 * ri + 1) * p.delta - (15 * ri + 4) * p.u),
    ];
    rows.iter().map(|&(a, h)| (a as usize, h)).collect()
}

/// Protocritical droplets S̃(A*−1) and D̃(A*−1) for the parameter branch.
/// With `canonical` set, one representative of each is returned; otherwise
/// every distinct placement inside Λ⁻ under the 12 symmetries and all translations.
pub fn protocritical_seeds(p: &Params, lat: &HexLattice, canonical: bool) -> Result<(Vec<Configuration>, Vec<String>)> {
    let cq = critical_quantities(p)?;
    let mut warnings = Vec::new();
    if (lat.radius() as i64) <= 2 * cq.r_star + 3 {
        warnings.push(format!("lattice radius {} does not exceed 2r*+3 = {}", lat.radius(), 2 * cq.r_star + 3));
    }
    let area = cq.a_star - 1;
    let shapes = [s_tilde_faces(area)?, d_tilde_faces(area)?];
    let mut out = Vec::new();
    if canonical {
        for s in &shapes {
            out.push(place_faces(s, lat)?);
        }
        return Ok((out, warnings));
    }
    let reach = 2 * lat.radius() as i32 + 2;
    let mut seen = HashSet::new();
    for s in &shapes {
        for sym in Symmetry::all() {
            for di in -reach..=reach {
                for dj in -reach..=reach {
                    let pl = Placement {
                        symmetry: sym,
                        offset: (di, dj),
                    };
                    let faces: Vec<FaceCoord> = s.iter().map(|f| pl.apply(f)).collect();
                    if let Ok(c) = place_faces(&faces, lat) {
                        if seen.insert(c.clone()) {
                            out.push(c);
                        }
                    }
                }
            }
        }
    }
    Ok((out, warnings))
}

/// Canonical form of a face set modulo translations and the 12 lattice symmetries.
pub fn canonical_shape(faces: &[FaceCoord]) -> Vec<FaceCoord> {
    let mut best: Option<Vec<FaceCoord>> = None;
    for sym in Symmetry::all() {
        let mut img: Vec<FaceCoord> = faces.iter().map(|f| f.transform(sym)).collect();
        normalize_translation(&mut img);
        if best.as_ref().map_or(true, |b| img < *b) {
            best = Some(img);
        }
    }
    best.unwrap_or_default()
}

/// Translates a face set so its minimal `(a, b)` corner is at the origin, and sorts it.
pub fn normalize_translation(faces: &mut [FaceCoord]) {
    if faces.is_empty() {
        return;
    }
    let amin = faces.iter().map(|f| f.a).min().unwrap();
    let bmin = faces.iter().map(|f| f.b).min().unwrap();
    for f in faces.iter_mut() {
        *f = f.translate(-amin, -bmin);
    }
    faces.sort_unstable();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_roundtrip() {
        for s in [
            "E(2)",
            "EB(1,5)",
            "S(21)",
            "St(21)",
            "Dt(29)",
            "B(3)",
            "IB(3,2)",
            "EB(1,4)@2m+1,-1",
            "E(1)+0,3",
        ] {
            let spec: ShapeSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        for s in ["E2", "X(1)", "EB(1,7)", "E(1)@6", "E(1)junk"] {
            assert!(s.parse::<ShapeSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn bar_order_alternates_base_and_outer() {
        for r in 1..4 {
            for m in 1..=6 {
                let inner: HashSet<FaceCoord> = quasi_regular_faces(r, m - 1).into_iter().collect();
                let bar = bar_faces(r, m);
                assert_eq!(bar.len(), bar_size(r, m));
                for (n, f) in bar.iter().enumerate() {
                    let touches = f.neighbors().iter().any(|g| inner.contains(g));
                    assert_eq!(touches, n % 2 == 0, "r={r} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn r0_ring_closes() {
        let ring = bar_faces(0, 1);
        for k in 0..5 {
            assert!(ring[k].neighbors().contains(&ring[k + 1]));
        }
        let mut all = ring.clone();
        all.sort();
        let mut hex = regular_faces(1);
        hex.sort();
        assert_eq!(all, hex);
    }
}
