//! Hypothesis verdicts for every closed-form update formula.
//!
//! Each named product is computed and compared to zero in-domain: exactly for
//! rationals, within the fixed float64 zero tolerance otherwise.

use std::fmt;

use super::DerivedQuantities;
use crate::drazin::nilpotency_degree;
use crate::scalar::{Scalar, ScalarDomain};
use crate::tensor::Tensor;

/// Named boolean verdicts plus nilpotency degrees for the hypotheses of the
/// update formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    pub index_a: usize,
    pub index_d: usize,
    pub index_z: usize,
    pub a_invertible: bool,
    pub d_invertible: bool,
    pub z_invertible: bool,
    pub d_is_identity: bool,

    /// degree t of S*A^pi
    pub nilpotency_t: Option<usize>,
    /// degree r of A^pi*S
    pub nilpotency_r: Option<usize>,
    /// degree u of Z*D^pi
    pub nilpotency_u: Option<usize>,
    /// degree v of D^pi*Z
    pub nilpotency_v: Option<usize>,

    /// S_{A^e}*T = A*A^D
    pub spae_t_left: bool,
    /// T*S_{A^e} = A*A^D
    pub t_spae_right: bool,
    /// K*D^pi*Z^D*H = K*D^D*Z^pi*H
    pub lemma27_c1: bool,
    /// K*Z^pi*D^D*H = K*Z^D*D^pi*H
    pub lemma27_c4: bool,

    pub cond_s_api_y_ae_zero: bool,
    pub cond_s_ae_y_api_zero: bool,
    pub cond_ae_y_api_s_zero: bool,
    pub cond_api_y_ae_s_zero: bool,
    pub cond_s_api_y_zero: bool,
    pub cond_y_api_s_zero: bool,
    pub cond_api_y_zero: bool,
    pub cond_y_api_zero: bool,

    pub cond_api_c_zero: bool,
    pub cond_b_api_zero: bool,
    pub cond_c_dpi_zd_b_zero: bool,
    pub cond_c_dd_zpi_b_zero: bool,
    pub cond_k_zpi_h_zero: bool,
    pub cond_c_zpi_b_zero: bool,
    pub cond_k_dpi_zd_h_zero: bool,
    pub dpi_eq_zpi: bool,
    /// Z^D = Z^D*D^pi - Z^pi*D^D
    pub zd_skew: bool,

    pub cond_z_dpi_r_de_zero: bool,
    pub cond_z_de_r_dpi_zero: bool,
    pub cond_de_r_dpi_z_zero: bool,
    pub cond_dpi_r_de_z_zero: bool,
    pub cond_z_dpi_r_zero: bool,
    pub cond_r_dpi_z_zero: bool,
}

fn chain<T: Scalar>(factors: &[&Tensor<T>]) -> Tensor<T> {
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = acc.einstein_product(f).expect("validated shapes");
    }
    acc
}

fn is_zero<T: Scalar>(t: &Tensor<T>, tol: f64) -> bool {
    t.is_zero_within(tol)
}

fn equal<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>, tol: f64) -> bool {
    is_zero(&a.sub(b).expect("same shapes"), tol)
}

/// Compute every verdict for the quadruple's derived quantities.
pub fn check_conditions<T: Scalar>(q: &DerivedQuantities<T>) -> ConditionReport {
    let tol = ScalarDomain::of(T::DOMAIN).zero_tolerance;
    let (a, b, c, _d) = (q.a(), q.b(), q.c(), q.d());
    let (s, z, y, r) = (q.s(), q.z(), q.y(), q.r());
    let (ad, api, ae) = (q.a_d(), q.a_pi(), q.a_e());
    let (dd, dpi, de) = (q.d_d(), q.d_pi(), q.d_e());
    let (zd, zpi) = (q.z_d(), q.z_pi());
    let (h, k, t) = (q.h(), q.k(), q.t());

    let s_ae = q.s_ae();
    let a_ae = chain(&[a, ad]);
    let identity_h = Tensor::<T>::identity(q.d().shape().row_dims()).expect("square");

    let s_api = chain(&[s, api]);
    let api_s = chain(&[api, s]);
    let z_dpi = chain(&[z, dpi]);
    let dpi_z = chain(&[dpi, z]);

    let zd_skew_rhs = chain(&[zd, dpi])
        .sub(&chain(&[zpi, dd]))
        .expect("same shapes");

    ConditionReport {
        index_a: q.a_drazin().index,
        index_d: q.d_drazin().index,
        index_z: q.z_drazin().index,
        a_invertible: q.a_drazin().index == 0,
        d_invertible: q.d_drazin().index == 0,
        z_invertible: q.z_drazin().index == 0,
        d_is_identity: equal(q.d(), &identity_h, tol),

        nilpotency_t: nilpotency_degree(&s_api, None).expect("square"),
        nilpotency_r: nilpotency_degree(&api_s, None).expect("square"),
        nilpotency_u: nilpotency_degree(&z_dpi, None).expect("square"),
        nilpotency_v: nilpotency_degree(&dpi_z, None).expect("square"),

        spae_t_left: equal(&chain(&[&s_ae, t]), &a_ae, tol),
        t_spae_right: equal(&chain(&[t, &s_ae]), &a_ae, tol),
        lemma27_c1: equal(&chain(&[k, dpi, zd, h]), &chain(&[k, dd, zpi, h]), tol),
        lemma27_c4: equal(&chain(&[k, zpi, dd, h]), &chain(&[k, zd, dpi, h]), tol),

        cond_s_api_y_ae_zero: is_zero(&chain(&[s, api, y, ae]), tol),
        cond_s_ae_y_api_zero: is_zero(&chain(&[s, ae, y, api]), tol),
        cond_ae_y_api_s_zero: is_zero(&chain(&[ae, y, api, s]), tol),
        cond_api_y_ae_s_zero: is_zero(&chain(&[api, y, ae, s]), tol),
        cond_s_api_y_zero: is_zero(&chain(&[s, api, y]), tol),
        cond_y_api_s_zero: is_zero(&chain(&[y, api, s]), tol),
        cond_api_y_zero: is_zero(&chain(&[api, y]), tol),
        cond_y_api_zero: is_zero(&chain(&[y, api]), tol),

        cond_api_c_zero: is_zero(&chain(&[api, c]), tol),
        cond_b_api_zero: is_zero(&chain(&[b, api]), tol),
        cond_c_dpi_zd_b_zero: is_zero(&chain(&[c, dpi, zd, b]), tol),
        cond_c_dd_zpi_b_zero: is_zero(&chain(&[c, dd, zpi, b]), tol),
        cond_k_zpi_h_zero: is_zero(&chain(&[k, zpi, h]), tol),
        cond_c_zpi_b_zero: is_zero(&chain(&[c, zpi, b]), tol),
        cond_k_dpi_zd_h_zero: is_zero(&chain(&[k, dpi, zd, h]), tol),
        dpi_eq_zpi: equal(dpi, zpi, tol),
        zd_skew: equal(zd, &zd_skew_rhs, tol),

        cond_z_dpi_r_de_zero: is_zero(&chain(&[z, dpi, r, de]), tol),
        cond_z_de_r_dpi_zero: is_zero(&chain(&[z, de, r, dpi]), tol),
        cond_de_r_dpi_z_zero: is_zero(&chain(&[de, r, dpi, z]), tol),
        cond_dpi_r_de_z_zero: is_zero(&chain(&[dpi, r, de, z]), tol),
        cond_z_dpi_r_zero: is_zero(&chain(&[z, dpi, r]), tol),
        cond_r_dpi_z_zero: is_zero(&chain(&[r, dpi, z]), tol),
    }
}

impl ConditionReport {
    /// (name, verdict) pairs for rendering.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let deg = |d: &Option<usize>| match d {
            Some(v) => v.to_string(),
            None => "none".to_string(),
        };
        vec![
            ("ind(A)", self.index_a.to_string()),
            ("ind(D)", self.index_d.to_string()),
            ("ind(Z)", self.index_z.to_string()),
            ("A invertible", self.a_invertible.to_string()),
            ("D invertible", self.d_invertible.to_string()),
            ("Z invertible", self.z_invertible.to_string()),
            ("D = I", self.d_is_identity.to_string()),
            ("t = nilpotency(S*A^pi)", deg(&self.nilpotency_t)),
            ("r = nilpotency(A^pi*S)", deg(&self.nilpotency_r)),
            ("u = nilpotency(Z*D^pi)", deg(&self.nilpotency_u)),
            ("v = nilpotency(D^pi*Z)", deg(&self.nilpotency_v)),
            ("S_{A^e}*T = A*A^D", self.spae_t_left.to_string()),
            ("T*S_{A^e} = A*A^D", self.t_spae_right.to_string()),
            ("K*D^pi*Z^D*H = K*D^D*Z^pi*H", self.lemma27_c1.to_string()),
            ("K*Z^pi*D^D*H = K*Z^D*D^pi*H", self.lemma27_c4.to_string()),
            ("S*A^pi*Y*A^e = 0", self.cond_s_api_y_ae_zero.to_string()),
            ("S*A^e*Y*A^pi = 0", self.cond_s_ae_y_api_zero.to_string()),
            ("A^e*Y*A^pi*S = 0", self.cond_ae_y_api_s_zero.to_string()),
            ("A^pi*Y*A^e*S = 0", self.cond_api_y_ae_s_zero.to_string()),
            ("S*A^pi*Y = 0", self.cond_s_api_y_zero.to_string()),
            ("Y*A^pi*S = 0", self.cond_y_api_s_zero.to_string()),
            ("A^pi*Y = 0", self.cond_api_y_zero.to_string()),
            ("Y*A^pi = 0", self.cond_y_api_zero.to_string()),
            ("A^pi*C = 0", self.cond_api_c_zero.to_string()),
            ("B*A^pi = 0", self.cond_b_api_zero.to_string()),
            ("C*D^pi*Z^D*B = 0", self.cond_c_dpi_zd_b_zero.to_string()),
            ("C*D^D*Z^pi*B = 0", self.cond_c_dd_zpi_b_zero.to_string()),
            ("K*Z^pi*H = 0", self.cond_k_zpi_h_zero.to_string()),
            ("C*Z^pi*B = 0", self.cond_c_zpi_b_zero.to_string()),
            ("K*D^pi*Z^D*H = 0", self.cond_k_dpi_zd_h_zero.to_string()),
            ("D^pi = Z^pi", self.dpi_eq_zpi.to_string()),
            ("Z^D = Z^D*D^pi - Z^pi*D^D", self.zd_skew.to_string()),
            ("Z*D^pi*R*D^e = 0", self.cond_z_dpi_r_de_zero.to_string()),
            ("Z*D^e*R*D^pi = 0", self.cond_z_de_r_dpi_zero.to_string()),
            ("D^e*R*D^pi*Z = 0", self.cond_de_r_dpi_z_zero.to_string()),
            ("D^pi*R*D^e*Z = 0", self.cond_dpi_r_de_z_zero.to_string()),
            ("Z*D^pi*R = 0", self.cond_z_dpi_r_zero.to_string()),
            ("R*D^pi*Z = 0", self.cond_r_dpi_z_zero.to_string()),
        ]
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, verdict) in self.entries() {
            writeln!(f, "  {name:<32} {verdict}")?;
        }
        Ok(())
    }
}
