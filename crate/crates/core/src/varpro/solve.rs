use nalgebra::{DMatrix, DVector};

use super::JacobianMode;
use crate::DesignMatrixBundle;

/// Least-squares solution on a fixed knot vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    /// `c = Φ⁺ f`, coefficients of the unnormalized basis.
    pub coeffs: Vec<f64>,
    /// `P_Φ f`.
    pub fitted: Vec<f64>,
    /// `r = f − P_Φ f`.
    pub residual: Vec<f64>,
    /// `‖r‖²`.
    pub objective: f64,
}

pub fn linear_solve(bundle: &DesignMatrixBundle, f: &[f64]) -> LinearSolution {
    let fv = DVector::from_column_slice(f);
    let uf = bundle.u().tr_mul(&fv);
    let mut z = uf.clone();
    z.component_div_assign(bundle.sigma());
    let coeffs = bundle.v() * z;
    let fitted = bundle.u() * uf;
    let residual = &fv - &fitted;
    LinearSolution {
        coeffs: coeffs.as_slice().to_vec(),
        fitted: fitted.as_slice().to_vec(),
        objective: residual.norm_squared(),
        residual: residual.as_slice().to_vec(),
    }
}

/// Columns `K_j f = P⊥ D_j c` and `L_j f = (Φ⁺)ᵀ D_jᵀ r`, one per free knot.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianTerms {
    pub k: DMatrix<f64>,
    pub l: DMatrix<f64>,
}

impl JacobianTerms {
    pub fn jacobian(&self, mode: JacobianMode) -> DMatrix<f64> {
        match mode {
            JacobianMode::Full => -(&self.k + &self.l),
            JacobianMode::Kaufman => -&self.k,
        }
    }
}

pub fn jacobian_terms(bundle: &DesignMatrixBundle, sol: &LinearSolution) -> JacobianTerms {
    let rows = bundle.rows();
    let cols = bundle.cols();
    let slabs = bundle.deriv_slabs();
    let mut k = DMatrix::zeros(rows, slabs.len());
    let mut l = DMatrix::zeros(rows, slabs.len());
    for (m, slab) in slabs.iter().enumerate() {
        let dc = DVector::from_vec(slab.mul_vec(&sol.coeffs, rows));
        let kc = &dc - bundle.project(&dc);
        k.set_column(m, &kc);
        let dtr = DVector::from_vec(slab.tr_mul_vec(&sol.residual, cols));
        l.set_column(m, &bundle.pinv_tr_mul(&dtr));
    }
    JacobianTerms { k, l }
}

/// Jacobian of `P⊥_Φ f` with respect to the interior knots.
pub fn vp_jacobian(bundle: &DesignMatrixBundle, f: &[f64], mode: JacobianMode) -> DMatrix<f64> {
    let sol = linear_solve(bundle, f);
    jacobian_terms(bundle, &sol).jacobian(mode)
}

/// `∇ r2 = 2 Jᵀ r` with the full Jacobian.
pub fn vp_gradient(bundle: &DesignMatrixBundle, f: &[f64]) -> DVector<f64> {
    let sol = linear_solve(bundle, f);
    let j = jacobian_terms(bundle, &sol).jacobian(JacobianMode::Full);
    2.0 * j.tr_mul(&DVector::from_column_slice(&sol.residual))
}
