//! Text, JSON and SVG renderings of a decomposition.

use std::fmt::Write as _;

use cadlift::arith::{isolate_real_roots, ratio, MPoly, Rat, UPoly, VarOrder};
use cadlift::chains::SamplePoint;
use cadlift::lifting::{Cad, CadOutcome, Cell, CellIndex};
use cadlift::projection::OperatorKind;
use cadlift::verify::VerificationReport;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

fn sign_char(s: i8) -> char {
    match s {
        1 => '+',
        -1 => '-',
        _ => '0',
    }
}

fn operator_name(op: OperatorKind) -> &'static str {
    match op {
        OperatorKind::Collins => "collins",
        _ => "mccallum",
    }
}

/// One coordinate of a sample, as text.
fn coordinate_text(sp: &SamplePoint, v: usize, order: &VarOrder) -> String {
    match sp.rational(v) {
        Some(q) => q.to_string(),
        None => {
            let iv = sp.interval(v).unwrap();
            format!(
                "root({}, [{}, {}])",
                sp.def(v).unwrap().display(order),
                iv.lo,
                iv.hi
            )
        }
    }
}

fn coordinate_json(sp: &SamplePoint, v: usize, order: &VarOrder) -> Value {
    match sp.rational(v) {
        Some(q) => json!({ "var": order.name(v), "value": q.to_string() }),
        None => {
            let iv = sp.interval(v).unwrap();
            json!({
                "var": order.name(v),
                "root_of": sp.def(v).unwrap().display(order).to_string(),
                "lo": iv.lo.to_string(),
                "hi": iv.hi.to_string(),
            })
        }
    }
}

fn signs(cell: &Cell, polys: &[MPoly]) -> Vec<i8> {
    let mut sp = cell.sample.clone();
    polys.iter().map(|p| sp.sign_at(p)).collect()
}

/// One line per cell of the top level.
pub fn text(cad: &Cad, polys: &[MPoly]) -> String {
    let mut out = String::new();
    for cell in cad.leaves() {
        let coords: Vec<String> = (0..cad.nvars())
            .map(|v| {
                format!(
                    "{} = {}",
                    cad.order.name(v),
                    coordinate_text(&cell.sample, v, &cad.order)
                )
            })
            .collect();
        let s: String = signs(cell, polys).into_iter().map(sign_char).collect();
        writeln!(
            out,
            "{} dim {} sample {} signs {}",
            cell.index,
            cell.dimension(),
            coords.join(", "),
            s
        )
        .unwrap();
    }
    out
}

pub fn fail_text(cell: &CellIndex, poly: &MPoly, order: &VarOrder) -> String {
    format!("FAIL cell {cell} polynomial {}\n", poly.display(order))
}

pub fn report_text(report: &VerificationReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        write!(
            out,
            "# verify {}: {} ({} violations)",
            c.name, status, c.violations
        )
        .unwrap();
        if let Some(ce) = &c.counterexample {
            write!(out, " e.g. {ce}").unwrap();
        }
        out.push('\n');
    }
    writeln!(
        out,
        "# seed {} samples {}",
        report.seed, report.samples_used
    )
    .unwrap();
    out
}

fn node(cad: &Cad, level: usize, i: usize, polys: &[MPoly]) -> Value {
    let cell = &cad.levels[level][i];
    let mut obj = serde_json::Map::new();
    obj.insert("index".into(), json!(cell.index));
    obj.insert("dimension".into(), json!(cell.dimension()));
    obj.insert(
        "coordinate".into(),
        coordinate_json(&cell.sample, level, &cad.order),
    );
    if level + 1 == cad.nvars() {
        obj.insert("signs".into(), json!(signs(cell, polys)));
    } else {
        let stack = cad
            .stack_over(level + 1, Some(i))
            .expect("every cell has a stack");
        let children: Vec<Value> = stack
            .cells
            .clone()
            .map(|j| node(cad, level + 1, j, polys))
            .collect();
        obj.insert("stack".into(), Value::Array(children));
    }
    Value::Object(obj)
}

fn header(
    order: &VarOrder,
    op: OperatorKind,
    polys: &[MPoly],
    result: &str,
) -> serde_json::Map<String, Value> {
    let mut obj = serde_json::Map::new();
    obj.insert("schema".into(), json!("cadlift-cad"));
    obj.insert("version".into(), json!(SCHEMA_VERSION));
    obj.insert("result".into(), json!(result));
    obj.insert("variables".into(), json!(order.names()));
    obj.insert("operator".into(), json!(operator_name(op)));
    if let OperatorKind::McCallumReducedEC(i) = op {
        obj.insert("ec".into(), json!(i + 1));
    }
    let shown: Vec<String> = polys.iter().map(|p| p.display(order).to_string()).collect();
    obj.insert("polynomials".into(), json!(shown));
    obj
}

/// The nested stack tree.
pub fn json_tree(cad: &Cad, polys: &[MPoly], report: Option<&VerificationReport>) -> Value {
    let mut obj = header(&cad.order, cad.operator, polys, "OK");
    let proj: Vec<Vec<String>> = cad
        .proj
        .levels
        .iter()
        .map(|l| {
            l.iter()
                .map(|p| p.display(&cad.order).to_string())
                .collect()
        })
        .collect();
    obj.insert("projection".into(), json!(proj));
    obj.insert("cell_count".into(), json!(cad.num_cells()));
    let top = &cad.stacks[0][0];
    let cells: Vec<Value> = top.cells.clone().map(|i| node(cad, 0, i, polys)).collect();
    obj.insert("cells".into(), Value::Array(cells));
    if let Some(r) = report {
        obj.insert("verification".into(), serde_json::to_value(r).unwrap());
    }
    Value::Object(obj)
}

pub fn json_fail(
    cell: &CellIndex,
    poly: &MPoly,
    order: &VarOrder,
    op: OperatorKind,
    polys: &[MPoly],
) -> Value {
    let mut obj = header(order, op, polys, "FAIL");
    obj.insert("cell".into(), json!(cell));
    obj.insert("polynomial".into(), json!(poly.display(order).to_string()));
    Value::Object(obj)
}

pub fn json_string<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap();
    s.push('\n');
    s
}

/// Render any outcome as JSON.
pub fn json_outcome(
    outcome: &CadOutcome,
    order: &VarOrder,
    op: OperatorKind,
    polys: &[MPoly],
    report: Option<&VerificationReport>,
) -> Value {
    match outcome {
        CadOutcome::Complete(cad) => json_tree(cad, polys, report),
        CadOutcome::Fail { cell, polynomial } => json_fail(cell, polynomial, order, op, polys),
    }
}

// SVG.

const SIZE: f64 = 600.0;
const MARGIN: f64 = 30.0;
const STEPS: i64 = 48;

fn approx(sp: &SamplePoint, v: usize) -> f64 {
    let mut sp = sp.clone();
    sp.refine_to(&ratio(1, 4096));
    sp.interval(v).unwrap().midpoint().to_f64().unwrap()
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (SIZE - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        let y = y.clamp(self.y.0, self.y.1);
        SIZE - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (SIZE - 2.0 * MARGIN)
    }
}

fn padded(vals: &[f64]) -> (f64, f64) {
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if vals.is_empty() {
        (-2.0, 2.0)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

/// Approximate sections of the stack over a rational `x`, lowest first.
fn sections_at(polys: &[MPoly], x: &Rat) -> Vec<f64> {
    let mut prod = UPoly::new(vec![Rat::from_integer(1.into())]);
    for p in polys {
        let f = p.subst(0, x);
        if f.is_zero() {
            continue;
        }
        if let Some(u) = f.to_upoly(1) {
            prod = prod.mul(&u);
        }
    }
    if prod.degree() == 0 {
        return vec![];
    }
    isolate_real_roots(&prod)
        .unwrap_or_default()
        .into_iter()
        .map(|iv| {
            let iv = cadlift::arith::refine_interval(&prod, &iv, &ratio(1, 4096)).unwrap_or(iv);
            iv.midpoint().to_f64().unwrap()
        })
        .collect()
}

/// Plot of a decomposition of the plane.
pub fn svg(cad: &Cad) -> Option<String> {
    if cad.nvars() != 2 {
        return None;
    }
    let line = &cad.levels[0];
    let xs: Vec<f64> = line
        .iter()
        .filter(|c| c.is_section())
        .map(|c| approx(&c.sample, 0))
        .collect();
    let ys: Vec<f64> = cad.levels[1]
        .iter()
        .filter(|c| c.is_section())
        .map(|c| approx(&c.sample, 1))
        .collect();
    let frame = Frame {
        x: padded(&xs),
        y: padded(&ys),
    };
    let mut body = String::new();
    let mut curves = String::new();
    let mut marks = String::new();
    for (i, cell) in line.iter().enumerate() {
        let stack = cad.stack_over(1, Some(i)).unwrap();
        if cell.is_section() {
            let x = approx(&cell.sample, 0);
            let mut prev = frame.y.0;
            for j in stack.cells.clone() {
                let c = &cad.levels[1][j];
                if c.is_section() {
                    let y = approx(&c.sample, 1);
                    writeln!(
                        marks,
                        r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#b03a2e"><title>{}</title></circle>"##,
                        frame.px(x),
                        frame.py(y),
                        c.index
                    )
                    .unwrap();
                    prev = y;
                } else {
                    let next = stack
                        .cells
                        .clone()
                        .map(|k| &cad.levels[1][k])
                        .find(|d| d.is_section() && d.index > c.index)
                        .map_or(frame.y.1, |d| approx(&d.sample, 1));
                    writeln!(
                        curves,
                        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#7d3c98" stroke-width="1.5"><title>{}</title></line>"##,
                        frame.px(x),
                        frame.py(prev),
                        frame.px(x),
                        frame.py(next),
                        c.index
                    )
                    .unwrap();
                }
            }
            continue;
        }
        // A sector of the line: trace the sections across it.
        let lo = match i.checked_sub(1) {
            Some(j) => gap_end(&line[j].sample, true),
            None => Rat::from_float(frame.x.0).unwrap(),
        };
        let hi = match line.get(i + 1) {
            Some(c) => gap_end(&c.sample, false),
            None => Rat::from_float(frame.x.1).unwrap(),
        };
        let s = stack.sections();
        let mut traces: Vec<Vec<(f64, f64)>> = vec![Vec::new(); s];
        for k in 0..STEPS {
            let t = Rat::new((2 * k + 1).into(), (2 * STEPS).into());
            let x = &lo + (&hi - &lo) * t;
            let roots = sections_at(&stack.lifting.polys, &x);
            if roots.len() != s {
                continue;
            }
            let xf = x.to_f64().unwrap();
            for (tr, y) in traces.iter_mut().zip(roots) {
                tr.push((xf, y));
            }
        }
        for (j, idx) in stack.cells.clone().enumerate() {
            let c = &cad.levels[1][idx];
            if c.is_section() {
                let pts: Vec<String> = traces[j / 2]
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
                    .collect();
                writeln!(
                    curves,
                    r##"<polyline points="{}" fill="none" stroke="#1f4e8c" stroke-width="2"><title>{}</title></polyline>"##,
                    pts.join(" "),
                    c.index
                )
                .unwrap();
            } else {
                let k = j / 2;
                let below: Vec<(f64, f64)> = match k.checked_sub(1) {
                    Some(b) => traces[b].clone(),
                    None => traces_or_edge(&traces, &lo, &hi, frame.y.0),
                };
                let above: Vec<(f64, f64)> = match traces.get(k) {
                    Some(t) => t.clone(),
                    None => traces_or_edge(&traces, &lo, &hi, frame.y.1),
                };
                let mut pts: Vec<String> = below
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
                    .collect();
                pts.extend(
                    above
                        .iter()
                        .rev()
                        .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y))),
                );
                let fill = if (i + j) % 2 == 0 {
                    "#dfe9f5"
                } else {
                    "#eef3f9"
                };
                writeln!(
                    body,
                    r#"<polygon points="{}" fill="{fill}" stroke="none"><title>{}</title></polygon>"#,
                    pts.join(" "),
                    c.index
                )
                .unwrap();
            }
        }
    }
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(
        out,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{w}" fill="none" stroke="#999"/>"##,
        w = SIZE - 2.0 * MARGIN
    )
    .unwrap();
    out.push_str(&body);
    out.push_str(&curves);
    out.push_str(&marks);
    writeln!(
        out,
        r#"<text x="{MARGIN}" y="{:.0}" font-family="sans-serif" font-size="12">{} in [{:.2}, {:.2}], {} in [{:.2}, {:.2}]</text>"#,
        SIZE - 8.0,
        cad.order.name(0),
        frame.x.0,
        frame.x.1,
        cad.order.name(1),
        frame.y.0,
        frame.y.1
    )
    .unwrap();
    out.push_str("</svg>\n");
    Some(out)
}

/// A rational just past a section of the line: its interval end on the
/// side of the neighbouring sector.
fn gap_end(sp: &SamplePoint, upper: bool) -> Rat {
    let mut sp = sp.clone();
    sp.refine_to(&ratio(1, 4096));
    let iv = sp.interval(0).unwrap();
    if upper {
        iv.hi.clone()
    } else {
        iv.lo.clone()
    }
}

/// A horizontal frame edge sampled at the same abscissae as the traces.
fn traces_or_edge(traces: &[Vec<(f64, f64)>], lo: &Rat, hi: &Rat, y: f64) -> Vec<(f64, f64)> {
    if let Some(t) = traces.first() {
        return t.iter().map(|&(x, _)| (x, y)).collect();
    }
    vec![(lo.to_f64().unwrap(), y), (hi.to_f64().unwrap(), y)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_input;
    use cadlift::lifting::{build_cad, BuildOptions};

    fn cad_of(src: &str) -> (Cad, Vec<MPoly>) {
        let job = parse_input(src).unwrap();
        let cad = build_cad(
            &job.polynomials,
            &job.order,
            job.operator,
            &BuildOptions::default(),
        )
        .unwrap()
        .into_cad()
        .unwrap();
        (cad, job.polynomials)
    }

    #[test]
    fn circle_text_has_a_line_per_cell() {
        let (cad, f) = cad_of("vars: x, y\npoly: x^2 + y^2 - 1");
        let t = text(&cad, &f);
        assert_eq!(t.lines().count(), 13);
        assert!(t
            .lines()
            .any(|l| l == "(3,3) dim 2 sample x = 0, y = 0 signs -"));
    }

    #[test]
    fn algebraic_coordinates_show_their_polynomial() {
        let (cad, f) = cad_of("vars: x, y\npoly: x^2 - 2\npoly: y");
        let t = text(&cad, &f);
        assert!(t.contains("root(x^2 - 2, ["), "{t}");
    }

    #[test]
    fn json_tree_nests_stacks() {
        let (cad, f) = cad_of("vars: x, y\npoly: x^2 + y^2 - 1");
        let v = json_tree(&cad, &f, None);
        assert_eq!(v["result"], "OK");
        assert_eq!(v["version"], SCHEMA_VERSION);
        assert_eq!(v["cell_count"], 13);
        let sizes: Vec<usize> = v["cells"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["stack"].as_array().unwrap().len())
            .collect();
        assert_eq!(sizes, vec![1, 3, 5, 3, 1]);
        assert_eq!(v["cells"][2]["stack"][2]["signs"][0], -1);
    }

    #[test]
    fn json_fail_shape() {
        let order = VarOrder::new(["x", "y"]).unwrap();
        let p = MPoly::var(2, 1);
        let v = json_fail(
            &CellIndex::new(vec![2]),
            &p,
            &order,
            OperatorKind::McCallum,
            std::slice::from_ref(&p),
        );
        assert_eq!(v["result"], "FAIL");
        assert_eq!(v["cell"], json!([2]));
        assert_eq!(v["polynomial"], "y");
    }

    #[test]
    fn svg_only_in_the_plane() {
        let (cad, _) = cad_of("vars: x, y\npoly: x^2 + y^2 - 1");
        let s = svg(&cad).unwrap();
        assert!(s.starts_with("<svg"));
        assert_eq!(s.matches("<circle").count(), 2);
        assert_eq!(s.matches("<polyline").count(), 2);
        assert_eq!(svg(&cad).unwrap(), s);
        let (line, _) = cad_of("vars: x\npoly: x");
        assert!(svg(&line).is_none());
    }
}
