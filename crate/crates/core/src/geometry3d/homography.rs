use super::projection::Point2;
use crate::error::{Error, Result};

const MIN_DET: f64 = 1e-12;

/// 3×3 projective map, row-major, scaled so `h[2][2] == 1` when that entry is non-zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography(pub [[f64; 3]; 3]);

impl Homography {
    pub const IDENTITY: Homography = Homography([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        let h = Homography(m).normalized();
        if !h.0.iter().flatten().all(|v| v.is_finite()) {
            return Err(Error::DegenerateHomography("non-finite entries".into()));
        }
        if h.det().abs() <= MIN_DET {
            return Err(Error::DegenerateHomography(format!(
                "determinant {} too small",
                h.det()
            )));
        }
        Ok(h)
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        Homography([[1.0, 0.0, tx], [0.0, 1.0, ty], [0.0, 0.0, 1.0]])
    }

    /// Uniform scale about the origin followed by a translation.
    pub fn scale_translate(s: f64, tx: f64, ty: f64) -> Self {
        Homography([[s, 0.0, tx], [0.0, s, ty], [0.0, 0.0, 1.0]])
    }

    fn normalized(self) -> Self {
        let k = self.0[2][2];
        if k.abs() > f64::EPSILON {
            let mut m = self.0;
            for v in m.iter_mut().flatten() {
                *v /= k;
            }
            Homography(m)
        } else {
            self
        }
    }

    pub fn det(&self) -> f64 {
        let a = &self.0;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    pub fn inverse(&self) -> Result<Homography> {
        let a = &self.0;
        let det = self.det();
        if det.abs() <= MIN_DET || !det.is_finite() {
            return Err(Error::DegenerateHomography(format!("not invertible (det {det})")));
        }
        let adj = [
            [
                a[1][1] * a[2][2] - a[1][2] * a[2][1],
                a[0][2] * a[2][1] - a[0][1] * a[2][2],
                a[0][1] * a[1][2] - a[0][2] * a[1][1],
            ],
            [
                a[1][2] * a[2][0] - a[1][0] * a[2][2],
                a[0][0] * a[2][2] - a[0][2] * a[2][0],
                a[0][2] * a[1][0] - a[0][0] * a[1][2],
            ],
            [
                a[1][0] * a[2][1] - a[1][1] * a[2][0],
                a[0][1] * a[2][0] - a[0][0] * a[2][1],
                a[0][0] * a[1][1] - a[0][1] * a[1][0],
            ],
        ];
        let mut inv = adj;
        for v in inv.iter_mut().flatten() {
            *v /= det;
        }
        Ok(Homography(inv).normalized())
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Homography) -> Homography {
        let mut m = [[0.0; 3]; 3];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.0[r][k] * other.0[k][c]).sum();
            }
        }
        Homography(m).normalized()
    }

    /// Maps a point; `None` when it lands on the line at infinity.
    pub fn apply(&self, p: Point2) -> Option<Point2> {
        let m = &self.0;
        let w = m[2][0] * p[0] + m[2][1] * p[1] + m[2][2];
        if w.abs() < 1e-12 {
            return None;
        }
        Some([
            (m[0][0] * p[0] + m[0][1] * p[1] + m[0][2]) / w,
            (m[1][0] * p[0] + m[1][1] * p[1] + m[1][2]) / w,
        ])
    }
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn check_quad(name: &str, q: &[Point2; 4]) -> Result<()> {
    if !q.iter().flatten().all(|v| v.is_finite()) {
        return Err(Error::DegenerateHomography(format!(
            "{name} quad has non-finite points"
        )));
    }
    let scale = q
        .iter()
        .flat_map(|p| {
            q.iter()
                .map(move |r| ((p[0] - r[0]).powi(2) + (p[1] - r[1]).powi(2)).sqrt())
        })
        .fold(0.0f64, f64::max);
    if scale <= 0.0 {
        return Err(Error::DegenerateHomography(format!(
            "{name} quad collapses to a point"
        )));
    }
    let eps = 1e-9 * scale * scale;
    for (i, j, k) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
        if cross(q[i], q[j], q[k]).abs() <= eps {
            return Err(Error::DegenerateHomography(format!(
                "{name} points {i}, {j}, {k} are collinear"
            )));
        }
    }
    Ok(())
}

/// Four-point direct linear transform with `h33` pinned to one.
pub fn homography_from_quads(src: &[Point2; 4], dst: &[Point2; 4]) -> Result<Homography> {
    check_quad("source", src)?;
    check_quad("destination", dst)?;

    // Condition both point sets: center on the centroid, scale mean distance to √2.
    let (ts, src_n) = condition(src);
    let (td, dst_n) = condition(dst);

    let mut a = [[0.0f64; 9]; 8];
    for i in 0..4 {
        let [x, y] = src_n[i];
        let [u, v] = dst_n[i];
        a[2 * i] = [x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y, u];
        a[2 * i + 1] = [0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y, v];
    }
    let h = solve8(a).ok_or_else(|| Error::DegenerateHomography("singular DLT system".into()))?;
    let normalized = Homography([[h[0], h[1], h[2]], [h[3], h[4], h[5]], [h[6], h[7], 1.0]]);
    let full = td.inverse()?.compose(&normalized).compose(&ts);
    Homography::new(full.0)
}

fn condition(q: &[Point2; 4]) -> (Homography, [Point2; 4]) {
    let cx = q.iter().map(|p| p[0]).sum::<f64>() / 4.0;
    let cy = q.iter().map(|p| p[1]).sum::<f64>() / 4.0;
    let mean = q
        .iter()
        .map(|p| ((p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sqrt())
        .sum::<f64>()
        / 4.0;
    let s = std::f64::consts::SQRT_2 / mean;
    let t = Homography::scale_translate(s, -s * cx, -s * cy);
    let mut out = [[0.0; 2]; 4];
    for (o, p) in out.iter_mut().zip(q) {
        *o = [s * (p[0] - cx), s * (p[1] - cy)];
    }
    (t, out)
}

/// Gaussian elimination with partial pivoting on an 8×8 system given as an
/// augmented 8×9 matrix.
fn solve8(mut a: [[f64; 9]; 8]) -> Option<[f64; 8]> {
    for col in 0..8 {
        let pivot = (col..8).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        let pivot_row = a[col];
        for row in a.iter_mut().skip(col + 1) {
            let f = row[col] / pivot_row[col];
            if f != 0.0 {
                for (v, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *v -= f * p;
                }
            }
        }
    }
    let mut x = [0.0; 8];
    for row in (0..8).rev() {
        let tail: f64 = (row + 1..8).map(|k| a[row][k] * x[k]).sum();
        x[row] = (a[row][8] - tail) / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry3d::projection::{project_quad, CameraModel};
    use crate::geometry3d::rotation::rot_yaw;
    use proptest::prelude::*;

    /// Closed-form unit-square-to-quad map, independent of the DLT solve.
    fn square_to_quad(q: &[Point2; 4]) -> Homography {
        let [[x0, y0], [x1, y1], [x2, y2], [x3, y3]] = *q;
        let sx = x0 - x1 + x2 - x3;
        let sy = y0 - y1 + y2 - y3;
        let (dx1, dx2, dy1, dy2) = (x1 - x2, x3 - x2, y1 - y2, y3 - y2);
        let den = dx1 * dy2 - dx2 * dy1;
        let g = (sx * dy2 - dx2 * sy) / den;
        let h = (dx1 * sy - sx * dy1) / den;
        Homography([
            [x1 - x0 + g * x1, x3 - x0 + h * x3, x0],
            [y1 - y0 + g * y1, y3 - y0 + h * y3, y0],
            [g, h, 1.0],
        ])
    }

    const UNIT: [Point2; 4] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];

    fn reprojection_error(h: &Homography, src: &[Point2; 4], dst: &[Point2; 4]) -> f64 {
        src.iter()
            .zip(dst)
            .map(|(s, d)| {
                let p = h.apply(*s).unwrap();
                ((p[0] - d[0]).powi(2) + (p[1] - d[1]).powi(2)).sqrt()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn identical_quads_give_identity() {
        let q = [[3.0, 4.0], [100.0, 7.0], [90.0, 60.0], [5.0, 50.0]];
        let h = homography_from_quads(&q, &q).unwrap();
        for (a, b) in h.0.iter().flatten().zip(Homography::IDENTITY.0.iter().flatten()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn translation_recovered() {
        let src = [[0.0, 0.0], [20.0, 0.0], [20.0, 8.0], [0.0, 8.0]];
        let dst = src.map(|p| [p[0] + 10.0, p[1] + 5.0]);
        let h = homography_from_quads(&src, &dst).unwrap();
        assert!((h.0[0][2] - 10.0).abs() < 1e-9);
        assert!((h.0[1][2] - 5.0).abs() < 1e-9);
        assert_eq!(h.0[2][2], 1.0);
    }

    #[test]
    fn unit_square_to_yaw_trapezoid() {
        let cam = CameraModel::new(512.0, 512.0).unwrap();
        let dst = project_quad(128.0, 32.0, &rot_yaw(60.0).unwrap(), &cam).unwrap();
        let h = homography_from_quads(&UNIT, &dst).unwrap();
        assert!(reprojection_error(&h, &UNIT, &dst) < 1e-6);
        let oracle = square_to_quad(&dst);
        assert!(reprojection_error(&oracle, &UNIT, &dst) < 1e-9);
        for (a, b) in h.0.iter().flatten().zip(oracle.0.iter().flatten()) {
            assert!((a - b).abs() < 1e-7 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn collinear_rejected() {
        let bad = [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [0.0, 5.0]];
        assert!(matches!(
            homography_from_quads(&bad, &UNIT),
            Err(Error::DegenerateHomography(_))
        ));
        assert!(matches!(
            homography_from_quads(&UNIT, &bad),
            Err(Error::DegenerateHomography(_))
        ));
    }

    #[test]
    fn inverse_round_trips() {
        let dst = [[10.0, 3.0], [200.0, 20.0], [180.0, 60.0], [30.0, 50.0]];
        let h = homography_from_quads(&UNIT, &dst).unwrap();
        let back = h.inverse().unwrap().compose(&h);
        for (a, b) in back
            .0
            .iter()
            .flatten()
            .zip(Homography::IDENTITY.0.iter().flatten())
        {
            assert!((a - b).abs() < 1e-9);
        }
    }

    fn convex_quad() -> impl Strategy<Value = [Point2; 4]> {
        // jittered corners of a rectangle stay convex and well separated
        (
            20.0f64..300.0,
            20.0f64..300.0,
            prop::array::uniform8(-0.2f64..0.2),
            -500.0f64..500.0,
            -500.0f64..500.0,
        )
            .prop_map(|(w, h, j, ox, oy)| {
                let base = [[0.0, 0.0], [w, 0.0], [w, h], [0.0, h]];
                let mut q = [[0.0; 2]; 4];
                for i in 0..4 {
                    q[i] = [ox + base[i][0] + j[2 * i] * w, oy + base[i][1] + j[2 * i + 1] * h];
                }
                q
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn random_quads_reproject(src in convex_quad(), dst in convex_quad()) {
            let h = homography_from_quads(&src, &dst).unwrap();
            prop_assert!(reprojection_error(&h, &src, &dst) < 1e-6);
        }
    }
}
