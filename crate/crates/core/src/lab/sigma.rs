//! Sampling the Iwahori classes met by a `σ`-conjugacy class.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::bruhat::{iwahori_class_of, LaurentMatrix};
use super::field::FieldConfig;
use super::shtuka::random_gl_with_inverse;
use crate::affine::AffineWeylElement;
use crate::error::Result;
use crate::exec::Execution;

/// Iwahori classes of `g·x·σ(g)^{-1}` for random `g ∈ GL_h(F_q[t])` of
/// entry degree `< deg`; `g^{-1}` is polynomial, so the class is computed exactly.
pub fn sigma_conjugate_sample(
    x: &AffineWeylElement,
    cfg: FieldConfig,
    trials: u64,
    seed: u64,
    deg: usize,
    exec: Execution,
) -> Result<Vec<AffineWeylElement>> {
    let field = cfg.field()?;
    let base = LaurentMatrix::monomial(x);
    exec.map((0..trials).collect(), |trial| {
        let f = &*field;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let (g, g_inv) = random_gl_with_inverse(x.rank(), deg, f, &mut rng);
        let m = base.mul_poly_left(&g, f).mul_poly_right(&g_inv.sigma(1, f), f);
        iwahori_class_of(&m, f)
    })
    .into_iter()
    .collect()
}
