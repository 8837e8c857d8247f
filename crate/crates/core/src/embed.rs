use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generate::{CopyCatalog, HiInstance};
use crate::graph::Graph;
use crate::metric::Metric;
use crate::scalar::{cmp_scalar, max_scalar, mean, ratio_or_inf, Scalar, Stretch};

/// A total vertex map from a source metric into a host metric.
#[derive(Clone, Debug)]
pub struct Embedding<W> {
    pub map: Vec<usize>,
    pub source: Metric<W>,
    pub host: Metric<W>,
}

impl<W: Scalar> Embedding<W> {
    pub fn new(map: Vec<usize>, source: Metric<W>, host: Metric<W>) -> Result<Self> {
        if map.len() != source.size() {
            return Err(Error::InvalidParameter(format!(
                "map covers {} of {} source vertices",
                map.len(),
                source.size()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&h| h >= host.size()) {
            return Err(Error::VertexOutOfRange(bad, host.size()));
        }
        Ok(Embedding { map, source, host })
    }

    pub fn identity(metric: Metric<W>) -> Self {
        Embedding {
            map: (0..metric.size()).collect(),
            source: metric.clone(),
            host: metric,
        }
    }

    pub fn host_dist(&self, x: usize, y: usize) -> &W {
        self.host.dist(self.map[x], self.map[y])
    }
}

/// Expansion, contraction, their product, and optional per-edge ratios.
#[derive(Clone, Debug)]
pub struct DistortionReport<W> {
    pub expansion: W,
    pub contraction: Stretch<W>,
    pub distortion: Stretch<W>,
    pub dominates: bool,
    /// Host distance over edge weight, per source edge, when a source
    /// graph accompanied the computation.
    pub per_edge: Option<Vec<((usize, usize), W)>>,
}

impl<W: Scalar> DistortionReport<W> {
    pub fn per_edge_ratios(&self) -> Result<&[((usize, usize), W)]> {
        self.per_edge
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("report lacks per-edge ratios".into()))
    }
}

/// Distortion of an embedding: max expansion times max contraction over
/// all source pairs. Collapsing two vertices yields infinite contraction,
/// not an error.
pub fn distortion<W: Scalar>(e: &Embedding<W>) -> DistortionReport<W> {
    compute(e, None)
}

/// Same, plus per-edge ratios for the given source graph.
pub fn distortion_with_graph<W: Scalar>(e: &Embedding<W>, g: &Graph<W>) -> DistortionReport<W> {
    compute(e, Some(g))
}

fn compute<W: Scalar>(e: &Embedding<W>, g: Option<&Graph<W>>) -> DistortionReport<W> {
    let mut expansion = if e.source.size() < 2 {
        W::one()
    } else {
        W::zero()
    };
    let mut contraction = if e.source.size() < 2 {
        Stretch::Finite(W::one())
    } else {
        Stretch::Finite(W::zero())
    };
    let mut dominates = true;
    for (x, y) in e.source.pairs() {
        let nu = e.source.dist(x, y).clone();
        let mu = e.host_dist(x, y).clone();
        if cmp_scalar(&mu, &nu) == std::cmp::Ordering::Less {
            dominates = false;
        }
        expansion = max_scalar(expansion, mu.clone() / nu.clone());
        let c = ratio_or_inf(nu, mu);
        if contraction.cmp_stretch(&c) == std::cmp::Ordering::Less {
            contraction = c;
        }
    }
    let distortion = contraction.scale(&expansion);
    let per_edge = g.map(|g| {
        g.edges()
            .iter()
            .map(|edge| {
                let mu = e.host_dist(edge.u, edge.v).clone();
                ((edge.u, edge.v), mu / edge.w.clone())
            })
            .collect()
    });
    DistortionReport {
        expansion,
        contraction,
        distortion,
        dominates,
        per_edge,
    }
}

/// Host distances dominate source distances under the map.
pub fn dominates<W: Scalar>(e: &Embedding<W>) -> bool {
    e.source.pairs().all(|(x, y)| {
        cmp_scalar(e.host_dist(x, y), e.source.dist(x, y)) != std::cmp::Ordering::Less
    })
}

/// One color class: edges distorted by at least (2n+1)^j / 6 - 1/2.
#[derive(Clone, Debug)]
pub struct ColorCount<W> {
    pub color: usize,
    pub threshold: W,
    pub count: usize,
    /// Guaranteed floor m^{i-j-1} n^{2j} for minor-excluding hosts.
    pub floor: u128,
}

#[derive(Clone, Debug)]
pub struct ColorHistogram<W> {
    pub n: usize,
    pub depth: usize,
    pub colors: Vec<ColorCount<W>>,
}

/// Color threshold for level j: (2n+1)^j / 6 - 1/2, exact.
pub fn color_threshold<W: Scalar>(n: usize, j: usize) -> W {
    let base = (2 * n as i64 + 1).pow(j as u32);
    W::from_ratio(base - 3, 6)
}

/// Count, for each color j = 1..i-1, the H_i edges whose per-edge
/// distortion meets the color-j threshold. Counts are monotone
/// nonincreasing in j since thresholds increase.
pub fn color_histogram<W: Scalar>(
    inst: &HiInstance<W>,
    report: &DistortionReport<W>,
) -> Result<ColorHistogram<W>> {
    let ratios = report.per_edge_ratios()?;
    if ratios.len() != inst.terminal.graph.edge_count() {
        return Err(Error::InvalidParameter(format!(
            "report covers {} edges, instance has {}",
            ratios.len(),
            inst.terminal.graph.edge_count()
        )));
    }
    for ((u, v), _) in ratios {
        if !inst.terminal.graph.has_edge(*u, *v) {
            return Err(Error::InvalidParameter(format!(
                "report mentions non-edge ({u},{v})"
            )));
        }
    }
    let mut colors = Vec::new();
    for j in 1..inst.depth {
        let threshold: W = color_threshold(inst.n, j);
        let count = ratios
            .iter()
            .filter(|(_, r)| cmp_scalar(r, &threshold) != std::cmp::Ordering::Less)
            .count();
        colors.push(ColorCount {
            color: j,
            threshold,
            count,
            floor: CopyCatalog::expected_copies(inst.n, inst.depth, j),
        });
    }
    Ok(ColorHistogram {
        n: inst.n,
        depth: inst.depth,
        colors,
    })
}

/// Mean edge distortion across samples, under the uniform distribution
/// over source edges.
#[derive(Clone, Debug)]
pub struct EdgeDistortionSummary<W> {
    /// Mean over samples of the mean per-edge ratio.
    pub mean: W,
    /// Tail-sum form: mean over samples of sum_{i>=1} Prob(floor(X) >= i).
    /// Diagnostic; equals the mean of floored ratios.
    pub tail_sum: W,
}

pub fn expected_edge_distortion<W: Scalar>(
    g: &Graph<W>,
    samples: &[DistortionReport<W>],
) -> Result<EdgeDistortionSummary<W>> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let m = g.edge_count();
    let mut means = Vec::with_capacity(samples.len());
    let mut tails = Vec::with_capacity(samples.len());
    for report in samples {
        let ratios = report.per_edge_ratios()?;
        if ratios.len() != m {
            return Err(Error::InvalidParameter(
                "sample does not cover all source edges".into(),
            ));
        }
        let values: Vec<W> = ratios.iter().map(|(_, r)| r.clone()).collect();
        means.push(mean(&values));
        // Integer-valued accounting: X = floor(ratio), E[X] computed as
        // the literal tail sum over thresholds i = 1..max.
        let floors: Vec<u64> = values.iter().map(Scalar::floor_u64).collect();
        let max = floors.iter().copied().max().unwrap_or(0);
        let mut tail = W::zero();
        for i in 1..=max {
            let at_least = floors.iter().filter(|&&f| f >= i).count();
            tail = tail + W::from_ratio(at_least as i64, m as i64);
        }
        tails.push(tail);
    }
    Ok(EdgeDistortionSummary {
        mean: mean(&means),
        tail_sum: mean(&tails),
    })
}

/// JSON form of a report; field names are part of the external contract.
#[derive(Serialize)]
pub struct ReportJson {
    pub expansion: String,
    pub contraction: String,
    pub distortion: String,
    pub dominates: bool,
    pub per_edge: Option<BTreeMap<String, String>>,
    pub colors: Option<BTreeMap<String, usize>>,
    pub floors: Option<BTreeMap<String, u128>>,
}

pub fn report_json<W: Scalar>(
    report: &DistortionReport<W>,
    histogram: Option<&ColorHistogram<W>>,
) -> ReportJson {
    ReportJson {
        expansion: report.expansion.format_token(),
        contraction: report.contraction.format_token(),
        distortion: report.distortion.format_token(),
        dominates: report.dominates,
        per_edge: report.per_edge.as_ref().map(|edges| {
            edges
                .iter()
                .map(|((u, v), r)| (format!("{u}-{v}"), r.format_token()))
                .collect()
        }),
        colors: histogram.map(|h| {
            h.colors
                .iter()
                .map(|c| (c.color.to_string(), c.count))
                .collect()
        }),
        floors: histogram.map(|h| {
            h.colors
                .iter()
                .map(|c| (c.color.to_string(), c.floor))
                .collect()
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::metric::shortest_path_metric;
    use crate::Rat;

    fn metric_of(g: &Graph<Rat>) -> Metric<Rat> {
        shortest_path_metric(g).unwrap()
    }

    #[test]
    fn identity_distortion_is_one() {
        let g: Graph<Rat> = generate::grid(3).unwrap();
        let e = Embedding::identity(metric_of(&g));
        let r = distortion(&e);
        assert_eq!(r.expansion, Rat::from_integer(1));
        assert_eq!(r.contraction, Stretch::Finite(Rat::from_integer(1)));
        assert_eq!(r.distortion, Stretch::Finite(Rat::from_integer(1)));
        assert!(r.dominates);
    }

    #[test]
    fn c4_onto_path_distortion_three() {
        let c4: Graph<Rat> = generate::cycle(4).unwrap();
        let p4: Graph<Rat> = Graph::unit(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        let e = Embedding::new(vec![0, 1, 2, 3], metric_of(&c4), metric_of(&p4)).unwrap();
        let r = distortion(&e);
        assert_eq!(r.expansion, Rat::from_integer(3));
        assert_eq!(r.contraction, Stretch::Finite(Rat::from_integer(1)));
        assert_eq!(r.distortion, Stretch::Finite(Rat::from_integer(3)));
    }

    #[test]
    fn host_scaling_cancels_in_distortion() {
        let c4: Graph<Rat> = generate::cycle(4).unwrap();
        let p4: Graph<Rat> = Graph::unit(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        let scaled = metric_of(&p4).scale(&Rat::new(7, 3));
        let e = Embedding::new(vec![0, 1, 2, 3], metric_of(&c4), scaled).unwrap();
        let r = distortion(&e);
        assert_eq!(r.expansion, Rat::from_integer(7));
        assert_eq!(r.contraction, Stretch::Finite(Rat::new(3, 7)));
        assert_eq!(r.distortion, Stretch::Finite(Rat::from_integer(3)));
    }

    #[test]
    fn collapse_gives_infinite_contraction() {
        let g: Graph<Rat> = generate::cycle(4).unwrap();
        let m = metric_of(&g);
        let e = Embedding::new(vec![0, 0, 1, 2], m.clone(), m).unwrap();
        let r = distortion(&e);
        assert_eq!(r.contraction, Stretch::Infinite);
        assert_eq!(r.distortion, Stretch::Infinite);
        assert!(!r.dominates);
    }

    #[test]
    fn domination_examples() {
        let g: Graph<Rat> = generate::cycle(4).unwrap();
        let m = metric_of(&g);
        assert!(dominates(&Embedding::identity(m.clone())));
        let halved = m.scale(&Rat::new(1, 2));
        let e = Embedding::new((0..4).collect(), m, halved).unwrap();
        assert!(!dominates(&e));
    }

    #[test]
    fn finite_distortion_at_least_one() {
        // expansion * contraction >= 1; equality forces uniform ratios.
        let c4: Graph<Rat> = generate::cycle(4).unwrap();
        let k4: Graph<Rat> = generate::complete(4).unwrap();
        let e = Embedding::new(vec![0, 1, 2, 3], metric_of(&c4), metric_of(&k4)).unwrap();
        let r = distortion(&e);
        if let Stretch::Finite(d) = &r.distortion {
            assert!(*d >= Rat::from_integer(1));
        } else {
            panic!("expected finite distortion");
        }
    }

    #[test]
    fn per_edge_ratios_for_dominating_maps_are_at_least_one() {
        let g: Graph<Rat> = generate::grid(3).unwrap();
        let m = metric_of(&g);
        let doubled = m.scale(&Rat::from_integer(2));
        let e = Embedding::new((0..9).collect(), m, doubled).unwrap();
        let r = distortion_with_graph(&e, &g);
        assert!(r.dominates);
        for (_, ratio) in r.per_edge.as_ref().unwrap() {
            assert!(*ratio >= Rat::from_integer(1));
        }
    }

    #[test]
    fn color_threshold_values() {
        // (2n+1)^j / 6 - 1/2 at n=2: j=1 -> 1/3, j=2 -> 11/3.
        assert_eq!(color_threshold::<Rat>(2, 1), Rat::new(1, 3));
        assert_eq!(color_threshold::<Rat>(2, 2), Rat::new(11, 3));
    }

    #[test]
    fn identity_histogram_on_h2() {
        let inst = generate::h_i::<Rat>(2, 2, 1_000_000).unwrap();
        let m = metric_of(&inst.terminal.graph);
        let e = Embedding::identity(m);
        let r = distortion_with_graph(&e, &inst.terminal.graph);
        let h = color_histogram(&inst, &r).unwrap();
        assert_eq!(h.colors.len(), 1);
        // All 400 ratios are exactly 1 >= 1/3.
        assert_eq!(h.colors[0].count, 400);
        assert_eq!(h.colors[0].floor, 4);
    }

    #[test]
    fn histogram_counts_monotone() {
        let inst = generate::h_i::<Rat>(2, 3, 1_000_000).unwrap();
        // Synthetic per-edge ratios spanning both thresholds.
        let per_edge: Vec<((usize, usize), Rat)> = inst
            .terminal
            .graph
            .edges()
            .iter()
            .enumerate()
            .map(|(k, e)| ((e.u, e.v), Rat::new(k as i64 % 29, 7)))
            .collect();
        let r = DistortionReport {
            expansion: Rat::from_integer(1),
            contraction: Stretch::Finite(Rat::from_integer(1)),
            distortion: Stretch::Finite(Rat::from_integer(1)),
            dominates: false,
            per_edge: Some(per_edge),
        };
        let h = color_histogram(&inst, &r).unwrap();
        assert_eq!(h.colors.len(), 2);
        assert!(h.colors[0].count > h.colors[1].count);
        assert!(h.colors[1].count > 0);
        assert_eq!(h.colors[0].floor, 80);
        assert_eq!(h.colors[1].floor, 16);
    }

    #[test]
    fn expected_edge_distortion_arithmetic() {
        let g: Graph<Rat> = generate::cycle(4).unwrap();
        let m = metric_of(&g);
        let one = Embedding::identity(m.clone());
        let r1 = distortion_with_graph(&one, &g);
        let tripled = m.scale(&Rat::from_integer(3));
        let e3 = Embedding::new(one.map.clone(), m, tripled).unwrap();
        let r3 = distortion_with_graph(&e3, &g);
        let s = expected_edge_distortion(&g, &[r1.clone(), r3]).unwrap();
        assert_eq!(s.mean, Rat::from_integer(2));
        assert_eq!(s.tail_sum, Rat::from_integer(2));
        let single = expected_edge_distortion(&g, &[r1]).unwrap();
        assert_eq!(single.mean, Rat::from_integer(1));
        assert!(expected_edge_distortion(&g, &[]).is_err());
    }

    #[test]
    fn report_json_shape() {
        let g: Graph<Rat> = generate::cycle(4).unwrap();
        let e = Embedding::identity(metric_of(&g));
        let r = distortion_with_graph(&e, &g);
        let json = serde_json::to_value(report_json(&r, None)).unwrap();
        assert_eq!(json["expansion"], "1");
        assert_eq!(json["contraction"], "1");
        assert_eq!(json["distortion"], "1");
        assert_eq!(json["dominates"], true);
        assert_eq!(json["per_edge"]["0-1"], "1");
        assert!(json["colors"].is_null());
    }
}
