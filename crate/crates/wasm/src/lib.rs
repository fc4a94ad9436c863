//! Browser boundary for generation.
//!
//! Four exports, flat `f32` arrays only:
//!
//! | export | returns |
//! |---|---|
//! | `init(model_bytes)` | nothing; replaces any previous model |
//! | `generate_from_seed(seed)` | 784 values |
//! | `generate(z)` | 784 values, `z` has 100 |
//! | `lerp_frames(seed_a, seed_b, steps)` | `steps × 784` values, frame-major |
//!
//! Values are generator outputs in `[-1, 1]`; gray level is
//! `round((v + 1) · 127.5)`. A seed names the latent `LatentVector::from_seed`
//! draws, the same one the command line uses for `--seed`.
//!
//! [`Boundary`] holds the logic and is what native tests exercise; the
//! `wasm-bindgen` wrappers only exist on `wasm32`.

use lerpgan_core::infer::InferenceSession;
use lerpgan_core::latent::{InterpolationPath, LatentVector};

#[derive(Debug, thiserror::Error)]
pub enum BoundaryError {
    #[error("init has not been called")]
    NotInitialized,
    #[error(transparent)]
    Model(#[from] lerpgan_core::Error),
}

pub type Result<T> = core::result::Result<T, BoundaryError>;

#[derive(Debug)]
pub struct Boundary {
    session: InferenceSession,
}

impl Boundary {
    pub fn init(model_bytes: &[u8]) -> Result<Self> {
        Ok(Self {
            session: InferenceSession::new(model_bytes)?,
        })
    }

    pub fn latent_dim(&self) -> usize {
        self.session.input_dim()
    }

    pub fn frame_len(&self) -> usize {
        self.session.output_dim()
    }

    pub fn generate(&mut self, z: &[f32]) -> Result<Vec<f32>> {
        Ok(self.session.generate(z)?.to_vec())
    }

    pub fn generate_from_seed(&mut self, seed: u32) -> Result<Vec<f32>> {
        let z = LatentVector::from_seed(seed as u64, self.latent_dim());
        self.generate(z.as_slice())
    }

    pub fn lerp_frames(&mut self, seed_a: u32, seed_b: u32, steps: u32) -> Result<Vec<f32>> {
        let dim = self.latent_dim();
        let path = InterpolationPath::new(
            LatentVector::from_seed(seed_a as u64, dim),
            LatentVector::from_seed(seed_b as u64, dim),
            steps as usize,
        )?;
        Ok(self.session.generate_path_flat(&path.points())?)
    }
}

#[cfg(target_arch = "wasm32")]
mod exports {
    use std::cell::RefCell;

    use wasm_bindgen::prelude::*;

    use super::{Boundary, BoundaryError};

    thread_local! {
        static SESSION: RefCell<Option<Boundary>> = const { RefCell::new(None) };
    }

    fn with<T>(f: impl FnOnce(&mut Boundary) -> super::Result<T>) -> Result<T, JsError> {
        SESSION.with(|s| match s.borrow_mut().as_mut() {
            Some(b) => f(b).map_err(|e| JsError::new(&e.to_string())),
            None => Err(JsError::new(&BoundaryError::NotInitialized.to_string())),
        })
    }

    #[wasm_bindgen]
    pub fn init(model_bytes: &[u8]) -> Result<(), JsError> {
        let b = Boundary::init(model_bytes).map_err(|e| JsError::new(&e.to_string()))?;
        SESSION.with(|s| *s.borrow_mut() = Some(b));
        Ok(())
    }

    #[wasm_bindgen]
    pub fn generate_from_seed(seed: u32) -> Result<Vec<f32>, JsError> {
        with(|b| b.generate_from_seed(seed))
    }

    #[wasm_bindgen]
    pub fn generate(z: &[f32]) -> Result<Vec<f32>, JsError> {
        with(|b| b.generate(z))
    }

    #[wasm_bindgen]
    pub fn lerp_frames(seed_a: u32, seed_b: u32, steps: u32) -> Result<Vec<f32>, JsError> {
        with(|b| b.lerp_frames(seed_a, seed_b, steps))
    }
}
