use super::{KnobLattice, Levels, RlError, TunableEnv};
use crate::imaging::{apply_config, ImageBuffer, Knob};

/// Brightness-only environment: every frame is a fixed base image rendered
/// at the current brightness level, forever.
pub struct ToyEnv {
    base: ImageBuffer,
    lattice: KnobLattice,
    levels: Levels,
}

impl ToyEnv {
    pub fn new(base: ImageBuffer) -> Self {
        Self {
            base,
            lattice: KnobLattice::only(Knob::Brightness),
            levels: [0; 4],
        }
    }

    /// A 64×48 smooth gradient with mid-range values.
    pub fn gradient() -> Self {
        let base = ImageBuffer::from_fn(64, 48, |x, y| {
            [(60 + x) as u8, (70 + y) as u8, (50 + (x + y) / 2) as u8]
        })
        .expect("non-empty");
        Self::new(base)
    }

    pub fn base(&self) -> &ImageBuffer {
        &self.base
    }

    pub fn render(&self, levels: &Levels) -> Result<ImageBuffer, RlError> {
        Ok(apply_config(&self.base, &self.lattice.config(levels))?)
    }

    /// Every reachable level vector, low to high.
    pub fn reachable(&self) -> Vec<Levels> {
        let (lo, hi) = self.lattice.bounds(Knob::Brightness);
        (lo..=hi)
            .map(|k| {
                let mut l = [0; 4];
                l[Knob::Brightness.index()] = k;
                l
            })
            .collect()
    }
}

impl TunableEnv for ToyEnv {
    fn lattice(&self) -> &KnobLattice {
        &self.lattice
    }

    fn levels(&self) -> Levels {
        self.levels
    }

    fn set_levels(&mut self, levels: Levels) -> Result<(), RlError> {
        self.levels = levels;
        Ok(())
    }

    fn next_frame(&mut self) -> Result<Option<ImageBuffer>, RlError> {
        self.render(&self.levels).map(Some)
    }
}
