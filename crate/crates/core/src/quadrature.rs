//! Symmetric quadrature on triangles.

/// Point in barycentric coordinates with its weight; weights sum to one, so a
/// rule integrates over a triangle `T` as `|T| * sum(w f)`.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    pub bary: [f64; 3],
    pub weight: f64,
}

// Dunavant's 12-point rule, exact for total degree 6.
const ORBIT3: [(f64, f64, f64); 2] = [
    (0.116_786_275_726_379, 0.501_426_509_658_179, 0.249_286_745_170_910),
    (0.050_844_906_370_207, 0.873_821_971_016_996, 0.063_089_014_491_502),
];
const ORBIT6: (f64, f64, f64, f64) = (
    0.082_851_075_618_374,
    0.053_145_049_844_817,
    0.310_352_451_033_784,
    0.636_502_499_121_399,
);

/// Degree-6 rule used for all element integrals.
pub fn degree6() -> Vec<QuadPoint> {
    let mut pts = Vec::with_capacity(12);
    for &(w, a, b) in &ORBIT3 {
        for bary in [[a, b, b], [b, a, b], [b, b, a]] {
            pts.push(QuadPoint { bary, weight: w });
        }
    }
    let (w, a, b, c) = ORBIT6;
    for bary in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
        pts.push(QuadPoint { bary, weight: w });
    }
    pts
}

/// Exact mean of `L1^i L2^j L3^k` over a triangle:
/// `2 i! j! k! / (i + j + k + 2)!`.
pub fn barycentric_monomial_mean(i: u32, j: u32, k: u32) -> f64 {
    fn fact(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }
    2.0 * fact(i) * fact(j) * fact(k) / fact(i + j + k + 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        let s: f64 = degree6().iter().map(|q| q.weight).sum();
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_through_degree_six() {
        let rule = degree6();
        for i in 0..=6 {
            for j in 0..=6 - i {
                for k in 0..=6 - i - j {
                    let q: f64 = rule
                        .iter()
                        .map(|p| {
                            p.weight
                                * p.bary[0].powi(i as i32)
                                * p.bary[1].powi(j as i32)
                                * p.bary[2].powi(k as i32)
                        })
                        .sum();
                    let exact = barycentric_monomial_mean(i, j, k);
                    assert!((q - exact).abs() <= 1e-14 * exact, "({i},{j},{k}): {q} vs {exact}");
                }
            }
        }
    }
}
