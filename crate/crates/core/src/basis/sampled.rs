//! Quadrature grids and functions sampled on them.

use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{graded_breaks, push_panel};
use crate::specfun::Order;

const MAX_PANEL_NODES: usize = 64;
const GRADED_PANEL_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    UnitInterval,
    /// `(0, radius)` standing in for the half-line.
    HalfLine { radius: f64 },
}

impl Domain {
    pub fn right_end(&self) -> f64 {
        match *self {
            Domain::UnitInterval => 1.0,
            Domain::HalfLine { radius } => radius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureTag {
    Lebesgue,
    Mu,
}

impl MeasureTag {
    pub fn name(self) -> &'static str {
        match self {
            MeasureTag::Lebesgue => "lebesgue",
            MeasureTag::Mu => "mu",
        }
    }
}

/// Nodes and weights; for the `Mu` tag the density is already inside the weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadGrid {
    domain: Domain,
    tag: MeasureTag,
    order: Order,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadGrid {
    /// Grid from explicit nodes and plain (density-free) weights.
    pub fn from_parts(
        domain: Domain,
        tag: MeasureTag,
        order: Order,
        nodes: Vec<f64>,
        plain_weights: Vec<f64>,
    ) -> Result<Self> {
        if nodes.len() != plain_weights.len() || nodes.is_empty() {
            return Err(Error::invalid("nodes and weights must be non-empty and of equal length"));
        }
        let end = domain.right_end();
        if nodes.windows(2).any(|w| w[1] <= w[0]) || nodes[0] <= 0.0 || nodes[nodes.len() - 1] >= end {
            return Err(Error::invalid("nodes must be strictly increasing and interior"));
        }
        if plain_weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::invalid("weights must be positive"));
        }
        let p = 2.0 * order.value() + 1.0;
        let weights = match tag {
            MeasureTag::Lebesgue => plain_weights,
            MeasureTag::Mu => nodes.iter().zip(&plain_weights).map(|(x, w)| w * x.powf(p)).collect(),
        };
        Ok(QuadGrid {
            domain,
            tag,
            order,
            nodes,
            weights,
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }
    pub fn tag(&self) -> MeasureTag {
        self.tag
    }
    pub fn order(&self) -> Order {
        self.order
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

fn density_is_smooth(order: Order) -> bool {
    let p = 2.0 * order.value() + 1.0;
    p >= 0.0 && (p - p.round()).abs() < 1e-14
}

/// Composite Gauss-Legendre grid with `n_nodes` nodes spread over equal panels of at
/// most 64 nodes. A non-polynomial density gets extra graded panels at the origin.
pub fn make_quadrature(domain: Domain, n_nodes: usize, tag: MeasureTag, order: Order) -> Result<QuadGrid> {
    if n_nodes < 8 {
        return Err(Error::invalid(format!("need at least 8 nodes, got {n_nodes}")));
    }
    if let Domain::HalfLine { radius } = domain {
        if !(radius > 1.0) || !radius.is_finite() {
            return Err(Error::invalid(format!("truncation radius must exceed 1, got {radius}")));
        }
    }
    let end = domain.right_end();
    let panels = n_nodes.div_ceil(MAX_PANEL_NODES);
    let per = n_nodes.div_ceil(panels);
    let width = end / panels as f64;
    let mut xs = Vec::with_capacity(n_nodes + 64);
    let mut ws = Vec::with_capacity(n_nodes + 64);
    let graded = tag == MeasureTag::Mu && !density_is_smooth(order);
    for k in 0..panels {
        let a = k as f64 * width;
        let b = if k + 1 == panels { end } else { a + width };
        if k == 0 && graded {
            let br = graded_breaks(0.0, b, 1e-12 * b, 4.0, b);
            for w in br.windows(2) {
                let n = if w[1] == b { per } else { GRADED_PANEL_NODES };
                push_panel(&mut xs, &mut ws, w[0], w[1], n);
            }
        } else {
            push_panel(&mut xs, &mut ws, a, b, per);
        }
    }
    QuadGrid::from_parts(domain, tag, order, xs, ws)
}

/// Values on a shared quadrature grid.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    grid: Arc<QuadGrid>,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: Arc<QuadGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(SampledFunction { grid, values })
    }

    pub fn from_fn(grid: Arc<QuadGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes.iter().map(|&x| f(x)).collect();
        SampledFunction { grid, values }
    }

    pub fn zeros(grid: Arc<QuadGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        SampledFunction { grid, values }
    }

    /// Linear interpolation of an ascending table onto `grid`, zero outside the table.
    pub fn from_table(grid: Arc<QuadGrid>, table: &[(f64, f64)]) -> Result<Self> {
        if table.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid("table abscissae must be strictly increasing"));
        }
        Ok(Self::from_fn(grid, |x| interpolate(table, x)))
    }

    pub fn grid(&self) -> &Arc<QuadGrid> {
        &self.grid
    }
    pub fn nodes(&self) -> &[f64] {
        &self.grid.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.grid.weights
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn tag(&self) -> MeasureTag {
        self.grid.tag
    }
    pub fn domain(&self) -> Domain {
        self.grid.domain
    }

    pub fn expect_tag(&self, tag: MeasureTag) -> Result<()> {
        if self.grid.tag != tag {
            return Err(Error::MeasureMismatch {
                expected: tag.name(),
                found: self.grid.tag.name(),
            });
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self.nodes().iter().zip(&self.values).map(|(&x, &v)| f(x, v)).collect();
        SampledFunction {
            grid: Arc::clone(&self.grid),
            values,
        }
    }

    pub fn integral(&self) -> f64 {
        self.weights().iter().zip(&self.values).map(|(w, v)| w * v).sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.weights().iter().zip(&self.values).map(|(w, v)| w * v.abs()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.weights().iter().zip(&self.values).map(|(w, v)| w * v * v).sum::<f64>().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Write the `x,value` CSV.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_xy_csv(out, self.nodes(), &self.values)
    }
}

fn interpolate(table: &[(f64, f64)], x: f64) -> f64 {
    if table.is_empty() || x < table[0].0 || x > table[table.len() - 1].0 {
        return 0.0;
    }
    let i = table.partition_point(|p| p.0 <= x);
    if i == 0 {
        return table[0].1;
    }
    if i == table.len() {
        return table[i - 1].1;
    }
    let (x0, y0) = table[i - 1];
    let (x1, y1) = table[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

#[derive(Serialize, Deserialize)]
struct XyRow {
    x: f64,
    value: f64,
}

pub(crate) fn write_xy_csv<W: Write>(out: W, xs: &[f64], vs: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (&x, &value) in xs.iter().zip(vs) {
        w.serialize(XyRow { x, value })?;
    }
    w.flush()?;
    Ok(())
}

/// Read an `x,value` CSV whose rows ascend in `x`.
pub fn read_xy_csv<R: Read>(input: R) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        let row: XyRow = rec?;
        if !row.x.is_finite() || !row.value.is_finite() {
            return Err(Error::invalid("non-finite entry in CSV"));
        }
        rows.push((row.x, row.value));
    }
    if rows.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::invalid("CSV rows must ascend strictly in x"));
    }
    Ok(rows)
}
