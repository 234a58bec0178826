use std::collections::HashSet;

use convex_core::sample::sample_uniform;
use convex_core::{
    hull3d_with, segment_meets_interior_with, Polytope, Segment3, Tolerances, Vec3,
};
use rand::Rng;
use serde::Serialize;
use surface_measure::{eval_functional, measure_linear_combine, PressureLaw};

use crate::family::boundary_measure;
use crate::{decompose_with, stretch, NoseDecomposition, NoseError};

/// Body `C` with apexes `O₁..O_k` and stretch parameters `s⃗ ∈ [0, 1]^k`.
#[derive(Clone, Debug, Serialize)]
pub struct NoseFamily {
    pub decompositions: Vec<NoseDecomposition>,
    pub s: Vec<f64>,
    /// Pairs `(i, j)` whose open segment `(Oᵢ, Oⱼ)` misses `int C`.
    pub hypothesis_failures: Vec<(usize, usize)>,
}

impl NoseFamily {
    /// Builds the family and rejects it if any pair of apexes violates the
    /// interior-segment hypothesis.
    pub fn new(c: &Polytope, apexes: &[Vec3], s: &[f64], tol: &Tolerances) -> Result<Self, NoseError> {
        let fam = Self::new_unchecked(c, apexes, s, tol)?;
        if let Some(&(i, j)) = fam.hypothesis_failures.first() {
            return Err(NoseError::FamilyInvariantViolated(format!(
                "open segment between apexes {i} and {j} misses the interior"
            )));
        }
        Ok(fam)
    }

    /// Builds the family, recording hypothesis failures instead of rejecting.
    pub fn new_unchecked(
        c: &Polytope,
        apexes: &[Vec3],
        s: &[f64],
        tol: &Tolerances,
    ) -> Result<Self, NoseError> {
        if apexes.len() != s.len() || apexes.is_empty() {
            return Err(NoseError::FamilyInvariantViolated(format!(
                "{} apexes but {} parameters",
                apexes.len(),
                s.len()
            )));
        }
        if let Some(&bad) = s.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(NoseError::OutOfRange(bad));
        }
        let decompositions = apexes
            .iter()
            .map(|o| decompose_with(c, o, tol))
            .collect::<Result<Vec<_>, _>>()?;
        let mut hypothesis_failures = Vec::new();
        for i in 0..apexes.len() {
            for j in i + 1..apexes.len() {
                let seg = Segment3::new(apexes[i], apexes[j]);
                if seg.is_degenerate() || !segment_meets_interior_with(c, &seg, tol) {
                    hypothesis_failures.push((i, j));
                }
            }
        }
        Ok(Self {
            decompositions,
            s: s.to_vec(),
            hypothesis_failures,
        })
    }

    pub fn body(&self) -> &Polytope {
        &self.decompositions[0].body
    }

    pub fn len(&self) -> usize {
        self.decompositions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decompositions.is_empty()
    }

    pub fn with_s(&self, s: &[f64]) -> Result<Self, NoseError> {
        if s.len() != self.len() {
            return Err(NoseError::FamilyInvariantViolated("parameter count".into()));
        }
        if let Some(&bad) = s.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(NoseError::OutOfRange(bad));
        }
        Ok(Self {
            s: s.to_vec(),
            ..self.clone()
        })
    }

    /// Whether the near regions of different apexes share no facet and no
    /// vertex.
    pub fn near_regions_disjoint(&self) -> bool {
        let c = self.body();
        let mut seen_facets: HashSet<usize> = HashSet::new();
        let mut seen_vertices: HashSet<usize> = HashSet::new();
        for d in &self.decompositions {
            let verts: HashSet<usize> = d
                .near
                .iter()
                .flat_map(|&f| c.facets()[f].vertices.iter().copied())
                .collect();
            if d.near.iter().any(|f| seen_facets.contains(f))
                || verts.iter().any(|v| seen_vertices.contains(v))
            {
                return false;
            }
            seen_facets.extend(d.near.iter().copied());
            seen_vertices.extend(verts);
        }
        true
    }

    /// Individual stretched bodies `Cᵢ(sᵢ)`.
    pub fn members(&self) -> Result<Vec<Polytope>, NoseError> {
        self.decompositions
            .iter()
            .zip(&self.s)
            .map(|(d, &s)| stretch(d, s, &[]))
            .collect()
    }
}

/// `C(s⃗)`: hull of the union of the individual stretched bodies.
pub fn multi_stretch(family: &NoseFamily) -> Result<Polytope, NoseError> {
    if !family.hypothesis_failures.is_empty() {
        return Err(NoseError::FamilyInvariantViolated(
            "interior-segment hypothesis fails".into(),
        ));
    }
    let members = family.members()?;
    let pts: Vec<Vec3> = members.iter().flat_map(|m| m.vertices().iter().copied()).collect();
    Ok(hull3d_with(&pts, family.decompositions[0].tolerances())?)
}

#[derive(Clone, Debug, Serialize)]
pub struct HullUnionReport {
    pub samples: usize,
    pub violations: usize,
    /// Worst distance outside every member, over the violating samples.
    pub worst_excess: f64,
}

/// Samples `C(s⃗)` uniformly and checks that each point lies in some `Cᵢ(sᵢ)`.
pub fn hull_equals_union<R: Rng + ?Sized>(
    family: &NoseFamily,
    samples: usize,
    rng: &mut R,
) -> Result<HullUnionReport, NoseError> {
    let hull = multi_stretch(family)?;
    let members = family.members()?;
    let eps = family.decompositions[0].tolerances().plane * hull.scale();
    let mut violations = 0;
    let mut worst_excess = 0.0f64;
    for p in sample_uniform(&hull, samples, rng) {
        let excess = members
            .iter()
            .map(|m| m.max_plane_distance(&p))
            .fold(f64::INFINITY, f64::min);
        if excess > eps {
            violations += 1;
            worst_excess = worst_excess.max(excess);
        }
    }
    Ok(HullUnionReport {
        samples,
        violations,
        worst_excess,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DisjointnessReport {
    pub hypothesis_ok: bool,
    pub hypothesis_failures: Vec<(usize, usize)>,
    pub near_pairs: usize,
    pub near_violations: usize,
    pub tangent_pairs: usize,
    pub tangent_violations: usize,
    pub min_distance: f64,
}

fn pick_weighted<R: Rng + ?Sized>(cum: &[f64], rng: &mut R) -> usize {
    let u = rng.gen::<f64>() * cum[cum.len() - 1];
    cum.partition_point(|&x| x < u).min(cum.len() - 1)
}

/// Uniform point on a triangle set with cumulative areas `cum`.
fn triangle_point<R: Rng + ?Sized>(tris: &[[Vec3; 3]], cum: &[f64], rng: &mut R) -> Vec3 {
    let t = tris[pick_weighted(cum, rng)];
    let (mut a, mut b) = (rng.gen::<f64>(), rng.gen::<f64>());
    if a + b > 1.0 {
        a = 1.0 - a;
        b = 1.0 - b;
    }
    t[0] + (t[1] - t[0]) * a + (t[2] - t[0]) * b
}

struct Sampler {
    tris: Vec<[Vec3; 3]>,
    tri_cum: Vec<f64>,
    edges: Vec<(Vec3, Vec3)>,
    edge_cum: Vec<f64>,
}

impl Sampler {
    fn new(d: &NoseDecomposition) -> Self {
        let mut tris = Vec::new();
        let mut tri_cum = Vec::new();
        let mut acc = 0.0;
        for poly in d.near_polygons() {
            for k in 1..poly.len() - 1 {
                let t = [poly[0], poly[k], poly[k + 1]];
                acc += 0.5 * (t[1] - t[0]).cross(&(t[2] - t[0])).norm();
                tris.push(t);
                tri_cum.push(acc);
            }
        }
        let v = d.body.vertices();
        let mut edges = Vec::new();
        let mut edge_cum = Vec::new();
        let mut acc = 0.0;
        for i in 0..d.silhouette.len() {
            let a = v[d.silhouette[i]];
            let b = v[d.silhouette[(i + 1) % d.silhouette.len()]];
            acc += (b - a).norm();
            edges.push((a, b));
            edge_cum.push(acc);
        }
        Self {
            tris,
            tri_cum,
            edges,
            edge_cum,
        }
    }

    fn near_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec3 {
        triangle_point(&self.tris, &self.tri_cum, rng)
    }

    fn silhouette_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec3 {
        let (a, b) = self.edges[pick_weighted(&self.edge_cum, rng)];
        a + (b - a) * rng.gen::<f64>()
    }
}

/// Samples segments `[Oᵢ, A]` with `A` on the near boundary of apex `i`, and
/// tangent segments `[Oᵢ, A′]` with `A′` on its silhouette, and checks that
/// segments of different apexes stay apart.
pub fn check_cone_disjointness<R: Rng + ?Sized>(
    family: &NoseFamily,
    pairs_per_apex_pair: usize,
    rng: &mut R,
) -> DisjointnessReport {
    let hypothesis_ok = family.hypothesis_failures.is_empty();
    let mut report = DisjointnessReport {
        hypothesis_ok,
        hypothesis_failures: family.hypothesis_failures.clone(),
        near_pairs: 0,
        near_violations: 0,
        tangent_pairs: 0,
        tangent_violations: 0,
        min_distance: f64::INFINITY,
    };
    if !hypothesis_ok {
        return report;
    }
    let d0 = &family.decompositions[0];
    let eps = d0.tolerances().strict * d0.body.scale();
    let samplers: Vec<Sampler> = family.decompositions.iter().map(Sampler::new).collect();
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            let (di, dj) = (&family.decompositions[i], &family.decompositions[j]);
            for _ in 0..pairs_per_apex_pair {
                let a = samplers[i].near_point(rng);
                let b = samplers[j].near_point(rng);
                let dist = Segment3::new(di.apex, a).distance_to(&Segment3::new(dj.apex, b));
                report.near_pairs += 1;
                report.min_distance = report.min_distance.min(dist);
                if dist <= eps {
                    report.near_violations += 1;
                }
                let a = samplers[i].silhouette_point(rng);
                let b = samplers[j].silhouette_point(rng);
                let dist = Segment3::new(di.apex, a).distance_to(&Segment3::new(dj.apex, b));
                report.tangent_pairs += 1;
                report.min_distance = report.min_distance.min(dist);
                if dist <= eps {
                    report.tangent_violations += 1;
                }
            }
        }
    }
    report
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiMeasureReport {
    pub grid_points: usize,
    /// Atom-wise deviation over area of `∂C`.
    pub max_measure_deviation: f64,
    /// `|F(∂C(s⃗)) − F(∂C) − Σ sᵢ(F(Vᵢ) − F(∂ᵢ₋C))| / |F(∂C(s⃗))|`.
    pub max_functional_deviation: f64,
}

/// Checks `ν_{∂C(s⃗)} = ν_{∂C} + Σ sᵢ νᵢ` and the matching identity for `F`
/// on the tensor grid `axis^k`.
pub fn measure_multi_check(
    family: &NoseFamily,
    law: &dyn PressureLaw,
    axis: &[f64],
) -> Result<MultiMeasureReport, NoseError> {
    if !family.near_regions_disjoint() {
        return Err(NoseError::FamilyInvariantViolated("near regions overlap".into()));
    }
    let tol = *family.decompositions[0].tolerances();
    let base = family.decompositions[0].body_measure();
    let area = family.body().area();
    let f_base = eval_functional(law, &base);
    let nus: Vec<_> = family.decompositions.iter().map(|d| d.nu0()).collect();
    let slopes: Vec<f64> = nus.iter().map(|n| eval_functional(law, n)).collect();
    let k = family.len();
    let total = axis.len().pow(k as u32);
    let mut max_measure_deviation = 0.0f64;
    let mut max_functional_deviation = 0.0f64;
    for idx in 0..total {
        let mut rem = idx;
        let s: Vec<f64> = (0..k)
            .map(|_| {
                let v = axis[rem % axis.len()];
                rem /= axis.len();
                v
            })
            .collect();
        let body = multi_stretch(&family.with_s(&s)?)?;
        let actual = boundary_measure(&body, &tol);
        let mut coeffs = vec![1.0];
        coeffs.extend(&s);
        let mut ms = vec![&base];
        ms.extend(nus.iter());
        let predicted = measure_linear_combine(&coeffs, &ms);
        max_measure_deviation = max_measure_deviation.max(actual.max_deviation(&predicted) / area);
        let f_actual = eval_functional(law, &actual);
        let f_pred = f_base + s.iter().zip(&slopes).map(|(a, b)| a * b).sum::<f64>();
        let denom = f_actual.abs().max(f_pred.abs());
        let dev = if denom > 0.0 { (f_actual - f_pred).abs() / denom } else { 0.0 };
        max_functional_deviation = max_functional_deviation.max(dev);
    }
    Ok(MultiMeasureReport {
        grid_points: total,
        max_measure_deviation,
        max_functional_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use convex_core::geom::v3;
    use convex_core::shapes;
    use rand::SeedableRng;
    use surface_measure::ClassicalLaw;

    fn two_apex_cube(s: [f64; 2]) -> NoseFamily {
        NoseFamily::new(
            &shapes::unit_cube(),
            &[v3(0.5, 0.5, 1.5), v3(0.5, 0.5, -0.5)],
            &s,
            &Tolerances::default(),
        )
        .unwrap()
    }

    #[test]
    fn zero_parameters_give_the_body() {
        let b = multi_stretch(&two_apex_cube([0.0, 0.0])).unwrap();
        assert_eq!(b.vertices().len(), 8);
        assert!((b.volume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_apex_matches_stretch() {
        let c = shapes::unit_cube();
        let fam = NoseFamily::new(&c, &[v3(0.2, 0.6, 1.7)], &[0.3], &Tolerances::default()).unwrap();
        let a = multi_stretch(&fam).unwrap();
        let b = stretch(&fam.decompositions[0], 0.3, &[]).unwrap();
        assert_eq!(a.vertices().len(), b.vertices().len());
        assert!((a.volume() - b.volume()).abs() < 1e-12);
    }

    #[test]
    fn opposite_apexes() {
        let fam = two_apex_cube([0.5, 0.5]);
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        let r = hull_equals_union(&fam, 2000, &mut rng).unwrap();
        assert_eq!(r.violations, 0);
        let r = check_cone_disjointness(&fam, 1000, &mut rng);
        assert!(r.hypothesis_ok);
        assert_eq!(r.near_violations + r.tangent_violations, 0);
        assert!(r.min_distance > 0.9);
        let m = measure_multi_check(&fam, &ClassicalLaw, &[0.0, 0.5, 1.0]).unwrap();
        assert!(m.max_measure_deviation < 1e-12, "{m:?}");
        assert!(m.max_functional_deviation < 1e-12, "{m:?}");
    }

    #[test]
    fn coincident_and_bad_apexes() {
        let c = shapes::unit_cube();
        let o = v3(0.5, 0.5, 1.5);
        let err = NoseFamily::new(&c, &[o, o], &[0.1, 0.1], &Tolerances::default()).unwrap_err();
        assert!(matches!(err, NoseError::FamilyInvariantViolated(_)));
        // two apexes above the same face: segment between them misses the body
        let fam = NoseFamily::new_unchecked(&c, &[o, v3(0.2, 0.5, 1.5)], &[0.1, 0.1], &Tolerances::default())
            .unwrap();
        let r = check_cone_disjointness(&fam, 10, &mut rand::rngs::StdRng::seed_from_u64(0));
        assert!(!r.hypothesis_ok);
        assert_eq!(r.near_pairs, 0);
        assert!(multi_stretch(&fam).is_err());
    }
}
