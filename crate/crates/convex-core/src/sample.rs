//! Uniform sampling inside a polytope.

use rand::Rng;

use crate::geom::Vec3;
use crate::Polytope;

/// `n` points uniformly distributed in `c`, drawn from a cone decomposition
/// over the vertex mean.
pub fn sample_uniform<R: Rng + ?Sized>(c: &Polytope, n: usize, rng: &mut R) -> Vec<Vec3> {
    let apex = c.vertex_mean();
    let v = c.vertices();
    let mut tets: Vec<[Vec3; 4]> = Vec::new();
    let mut cum: Vec<f64> = Vec::new();
    let mut total = 0.0;
    for t in c.triangles() {
        let (a, b, d) = (v[t[0]], v[t[1]], v[t[2]]);
        let vol = ((a - apex).cross(&(b - apex))).dot(&(d - apex)).abs() / 6.0;
        if vol > 0.0 {
            total += vol;
            tets.push([apex, a, b, d]);
            cum.push(total);
        }
    }
    (0..n)
        .map(|_| {
            let u = rng.gen::<f64>() * total;
            let k = cum.partition_point(|&x| x < u).min(tets.len() - 1);
            let [p0, p1, p2, p3] = tets[k];
            // uniform barycentric coordinates: sorted uniforms, differences
            let mut r = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
            r.sort_by(|a, b| a.total_cmp(b));
            let w = [r[0], r[1] - r[0], r[2] - r[1], 1.0 - r[2]];
            p0 * w[0] + p1 * w[1] + p2 * w[2] + p3 * w[3]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use rand::SeedableRng;

    #[test]
    fn cube_samples_fill_the_cube() {
        let c = shapes::unit_cube();
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let pts = sample_uniform(&c, 20_000, &mut rng);
        assert!(pts.iter().all(|p| c.contains(p, 1e-12)));
        let mean = pts.iter().sum::<Vec3>() / pts.len() as f64;
        assert!((mean - Vec3::new(0.5, 0.5, 0.5)).norm() < 0.01);
        let low = pts.iter().filter(|p| p.z < 0.25).count() as f64 / pts.len() as f64;
        assert!((low - 0.25).abs() < 0.015);
    }
}
