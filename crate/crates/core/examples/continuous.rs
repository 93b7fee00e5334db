//! Continuous-time kernels: the determinant against the sampler, and the
//! master equation and boundary conditions it must satisfy.

use tasep::kernels::CaseId;
use tasep::multipoint::{boundary_determinant, continuous_kernel, master_residual};
use tasep::simulate::Behavior;
use tasep::validate::continuous_vs_kernel;

fn main() -> tasep::Result<()> {
    let rates = [1.0, 0.7, 1.3];
    let (mu, lam) = ([0, 0], [2, 1]);
    for case in [CaseId::C, CaseId::A] {
        let v = continuous_kernel(case, 1.0, &mu, &lam, &rates, None)?;
        let r = master_residual(case, 1.0, &mu, &lam, &rates, 1e-4)?;
        let b = boundary_determinant(case, 1.0, &mu, &[1, 1], 1, &rates)?;
        println!("{}: P((2,1) | 0) = {:.12}, master residual {:.1e}, boundary {:.1e}", case, v, r, b);
    }
    for (b, name) in [(Behavior::Block, "blocking"), (Behavior::Push, "pushing")] {
        let r = continuous_vs_kernel(b, 2, 1.0, &[1.0, 1.0], 100_000, 11, 0, 6)?;
        println!("{} sampler vs kernel: TV {:.4}, chi-square p {:.3}", name, r.tv, r.p_value);
    }
    Ok(())
}
