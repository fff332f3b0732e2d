//! Text checkpoint format.
//!
//! ```text
//! densenet v1 6,32,32,1 sigmoid,sigmoid,linear
//! <layer 0 weight row 0>
//! ...
//! <layer 0 biases>
//! <layer 1 weight row 0>
//! ...
//! ```
//!
//! Values are written in scientific notation with 17 significant digits,
//! which round-trips every finite `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};

use super::{Activation, DenseNet, NetError};

const MAGIC: &str = "densenet";
const VERSION: &str = "v1";

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl DenseNet {
    pub fn to_checkpoint_string(&self) -> String {
        let sizes: Vec<String> = self.layer_sizes().iter().map(|s| s.to_string()).collect();
        let acts: Vec<&str> = self.activations().iter().map(|a| a.name()).collect();
        let mut out = format!("{MAGIC} {VERSION} {} {}\n", sizes.join(","), acts.join(","));
        for (w, b) in self.weights.iter().zip(&self.biases) {
            for row in w.rows() {
                let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
            let line: Vec<String> = b.iter().map(|&v| fmt_f64(v)).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn from_checkpoint_str(text: &str) -> Result<Self, NetError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| NetError::Checkpoint("empty checkpoint".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != MAGIC {
            return Err(NetError::Checkpoint(format!("bad header `{header}`")));
        }
        if fields[1] != VERSION {
            return Err(NetError::Version(fields[1].to_string()));
        }
        let sizes = fields[2]
            .split(',')
            .map(|s| s.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| NetError::Checkpoint(format!("layer sizes: {e}")))?;
        let acts = fields[3]
            .split(',')
            .map(str::parse::<Activation>)
            .collect::<Result<Vec<_>, _>>()?;
        let template = DenseNet::zeros(&sizes, &acts)?;

        let values = lines
            .flat_map(str::split_whitespace)
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| NetError::Checkpoint(format!("not a number: `{tok}`")))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if values.len() != template.param_count() {
            return Err(NetError::Checkpoint(format!(
                "expected {} parameters, found {}",
                template.param_count(),
                values.len()
            )));
        }

        let mut it = values.into_iter();
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in sizes.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let w: Vec<f64> = it.by_ref().take(fan_in * fan_out).collect();
            weights.push(Array2::from_shape_vec((fan_out, fan_in), w).unwrap());
            biases.push(Array1::from(it.by_ref().take(fan_out).collect::<Vec<_>>()));
        }
        DenseNet::from_parts(&sizes, &acts, weights, biases)
    }

    pub fn save(&self, path: &Path) -> Result<(), NetError> {
        fs::write(path, self.to_checkpoint_string())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, NetError> {
        Self::from_checkpoint_str(&fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn header_layout() {
        let net = DenseNet::zeros(&[2, 3, 1], &[Activation::Tanh, Activation::Linear]).unwrap();
        let text = net.to_checkpoint_string();
        assert!(text.starts_with("densenet v1 2,3,1 tanh,linear\n"));
        // 3 weight rows + bias for layer 0, 1 row + bias for layer 1
        assert_eq!(text.lines().count(), 1 + 4 + 2);
    }

    #[test]
    fn truncated_is_corrupt() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let net = DenseNet::init_uniform(&[2, 3, 1], &[Activation::Tanh, Activation::Linear], &mut rng).unwrap();
        let text = net.to_checkpoint_string();
        let cut = &text[..text.len() / 2];
        assert!(matches!(DenseNet::from_checkpoint_str(cut), Err(NetError::Checkpoint(_))));
    }

    #[test]
    fn version_mismatch() {
        let text = "densenet v2 1,1 linear\n0\n0\n";
        assert!(matches!(DenseNet::from_checkpoint_str(text), Err(NetError::Version(_))));
    }

    proptest! {
        #[test]
        fn roundtrip_is_bit_exact(seed in any::<u64>(), hidden in 1usize..9, scale in -30i32..30) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut net = DenseNet::init_uniform(
                &[3, hidden, 2],
                &[Activation::Sigmoid, Activation::Linear],
                &mut rng,
            ).unwrap();
            let factor = 10f64.powi(scale);
            net.params_mut().for_each(|p| *p *= factor);
            let back = DenseNet::from_checkpoint_str(&net.to_checkpoint_string()).unwrap();
            prop_assert!(back.params().zip(net.params()).all(|(a, b)| a.to_bits() == b.to_bits()));
            prop_assert_eq!(back.activations(), net.activations());
        }
    }
}
