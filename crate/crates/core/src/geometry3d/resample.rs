use image::{ImageBuffer, Pixel};

use super::homography::Homography;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    Nearest,
    Bilinear,
}

/// Inverse-maps every output pixel center through `h⁻¹` and samples the source.
///
/// Pixel `(i, j)` covers `[i, i+1) × [j, j+1)`, so its center is `(i+0.5, j+0.5)`.
/// Samples falling outside the source are fully transparent (all channels zero);
/// bilinear treats out-of-range neighbours the same way.
pub fn warp_image<P>(
    img: &ImageBuffer<P, Vec<u8>>,
    h: &Homography,
    out_w: u32,
    out_h: u32,
    sampling: Sampling,
) -> Result<ImageBuffer<P, Vec<u8>>>
where
    P: Pixel<Subpixel = u8>,
{
    let inv = h.inverse()?;
    let channels = P::CHANNEL_COUNT as usize;
    let (sw, sh) = (img.width() as i64, img.height() as i64);
    let src = img.as_raw();
    let mut out = ImageBuffer::<P, Vec<u8>>::new(out_w, out_h);
    let stride = out_w as usize * channels;

    {
        let buf: &mut [u8] = &mut out;
        for (y, row) in buf.chunks_exact_mut(stride.max(1)).enumerate() {
            for x in 0..out_w as usize {
                let Some([sx, sy]) = inv.apply([x as f64 + 0.5, y as f64 + 0.5]) else {
                    continue;
                };
                if !sx.is_finite() || !sy.is_finite() {
                    continue;
                }
                let dst = &mut row[x * channels..(x + 1) * channels];
                match sampling {
                    Sampling::Nearest => {
                        let (ix, iy) = (sx.floor() as i64, sy.floor() as i64);
                        if ix >= 0 && iy >= 0 && ix < sw && iy < sh {
                            let o = (iy as usize * sw as usize + ix as usize) * channels;
                            dst.copy_from_slice(&src[o..o + channels]);
                        }
                    }
                    Sampling::Bilinear => {
                        let fx = sx - 0.5;
                        let fy = sy - 0.5;
                        let x0 = fx.floor();
                        let y0 = fy.floor();
                        let (ax, ay) = (fx - x0, fy - y0);
                        let (x0, y0) = (x0 as i64, y0 as i64);
                        if x0 + 1 < 0 || y0 + 1 < 0 || x0 >= sw || y0 >= sh {
                            continue;
                        }
                        let weights = [
                            (x0, y0, (1.0 - ax) * (1.0 - ay)),
                            (x0 + 1, y0, ax * (1.0 - ay)),
                            (x0, y0 + 1, (1.0 - ax) * ay),
                            (x0 + 1, y0 + 1, ax * ay),
                        ];
                        for (c, d) in dst.iter_mut().enumerate() {
                            let mut acc = 0.0;
                            for &(px, py, w) in &weights {
                                if w > 0.0 && px >= 0 && py >= 0 && px < sw && py < sh {
                                    acc += w * src[(py as usize * sw as usize + px as usize) * channels + c]
                                        as f64;
                                }
                            }
                            *d = acc.round().clamp(0.0, 255.0) as u8;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
