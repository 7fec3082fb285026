use super::tensor::Tensor3;
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::network::Sample;
use crate::rng::SplitMix64;

pub const IMAGE_SIZE: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Glyph {
    X,
    O,
}

impl Glyph {
    /// One-hot: `[1, 0]` for X, `[0, 1]` for O.
    pub fn label(self) -> Vector {
        match self {
            Glyph::X => Vector::from_raw(vec![1.0, 0.0]),
            Glyph::O => Vector::from_raw(vec![0.0, 1.0]),
        }
    }

    /// Both diagonals for X, the border ring for O.
    pub fn mask(self) -> Tensor3 {
        let n = IMAGE_SIZE;
        let mut values = vec![0.0; n * n];
        for y in 0..n {
            for x in 0..n {
                let on = match self {
                    Glyph::X => x == y || x + y == n - 1,
                    Glyph::O => x == 0 || y == 0 || x == n - 1 || y == n - 1,
                };
                if on {
                    values[y * n + x] = 1.0;
                }
            }
        }
        Tensor3::from_raw(n, n, 1, values)
    }
}

/// `n` labelled 7×7×1 images. For each sample the class is drawn first
/// (X when the draw is below 0.5), then one noise value per pixel,
/// uniform in `[-noise, noise)`, in storage order.
pub fn xo_dataset(n: usize, seed: u64, noise: f64) -> Result<Vec<Sample<Tensor3>>> {
    if n == 0 {
        return Err(Error::InvalidConfig(
            "the dataset needs at least one sample".into(),
        ));
    }
    if !(noise.is_finite() && noise >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "noise amplitude must be finite and >= 0, got {noise}"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let samples = (0..n)
        .map(|_| {
            let glyph = if rng.next_f64() < 0.5 {
                Glyph::X
            } else {
                Glyph::O
            };
            let values = glyph
                .mask()
                .into_vec()
                .into_iter()
                .map(|v| v + rng.uniform(-noise, noise))
                .collect();
            (
                Tensor3::from_raw(IMAGE_SIZE, IMAGE_SIZE, 1, values),
                glyph.label(),
            )
        })
        .collect();
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_x_is_the_diagonals() {
        let data = xo_dataset(50, 1, 0.0).unwrap();
        let (img, _) = data.iter().find(|(_, l)| l[0] == 1.0).unwrap();
        assert_eq!(img, &Glyph::X.mask());
        let on = img.as_slice().iter().filter(|&&v| v == 1.0).count();
        assert_eq!(on, 13);
        assert_eq!(
            Glyph::O
                .mask()
                .as_slice()
                .iter()
                .filter(|&&v| v == 1.0)
                .count(),
            24
        );
    }

    #[test]
    fn labels_are_one_hot() {
        for (_, label) in xo_dataset(100, 2, 0.1).unwrap() {
            assert_eq!(label.iter().sum::<f64>(), 1.0);
            assert!(label.iter().all(|&v| v == 0.0 || v == 1.0));
        }
    }

    #[test]
    fn classes_are_balanced() {
        let data = xo_dataset(600, 7, 0.1).unwrap();
        let xs = data.iter().filter(|(_, l)| l[0] == 1.0).count();
        // 334 per an independent SplitMix64 run.
        assert_eq!(xs, 334);
        assert!((240..=360).contains(&xs), "{xs} X samples out of 600");
    }

    #[test]
    fn noise_is_bounded() {
        for (img, label) in xo_dataset(20, 3, 0.1).unwrap() {
            let glyph = if label[0] == 1.0 { Glyph::X } else { Glyph::O };
            for (v, m) in img.as_slice().iter().zip(glyph.mask().as_slice()) {
                assert!((v - m).abs() <= 0.1);
            }
        }
    }

    #[test]
    fn empty_dataset_is_rejected() {
        assert!(xo_dataset(0, 1, 0.1).is_err());
    }
}
