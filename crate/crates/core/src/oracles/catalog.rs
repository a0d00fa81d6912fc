use super::ScalarFunction;
use crate::Vector;

/// A named test function with its known structure.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub function: ScalarFunction,
    pub smooth: bool,
    pub convex: bool,
    pub local_minimizers: Vec<Vector>,
}

pub const CATALOG_NAMES: [&str; 8] = [
    "linear",
    "affine",
    "bowl",
    "shifted-bowl",
    "neg-norm",
    "max-affine",
    "bowl-plus-max-affine",
    "restricted-bowl",
];

/// First `dim` entries of `seq`, zero padded.
fn coef(seq: &[f64], dim: usize) -> Vector {
    Vector::from_fn(dim, |i, _| seq.get(i).copied().unwrap_or(0.0))
}

fn max_affine(dim: usize) -> ScalarFunction {
    ScalarFunction::max_affine(vec![
        (coef(&[1.0], dim), 0.0),
        (coef(&[-1.0, 0.5], dim), 0.0),
        (coef(&[0.0, -1.0], dim), -0.5),
    ])
}

pub fn catalog(name: &str, dim: usize) -> Option<CatalogEntry> {
    let shift = coef(&[1.0, 0.5], dim);
    let (name, function, smooth, local_minimizers) = match name {
        "linear" => ("linear", ScalarFunction::linear(coef(&[1.0, 0.5, -0.25], dim)), true, vec![]),
        "affine" => (
            "affine",
            ScalarFunction::affine(coef(&[-1.0, 0.3, 0.2], dim), 1.0),
            true,
            vec![],
        ),
        "bowl" => ("bowl", ScalarFunction::bowl(dim), true, vec![Vector::zeros(dim)]),
        "shifted-bowl" => (
            "shifted-bowl",
            ScalarFunction::shifted_bowl(&shift),
            true,
            vec![shift.clone()],
        ),
        "neg-norm" => ("neg-norm", ScalarFunction::neg_norm(Vector::zeros(dim)), false, vec![]),
        "max-affine" if dim >= 2 => (
            "max-affine",
            max_affine(dim),
            false,
            vec![coef(&[-0.1, -0.4], dim)],
        ),
        "bowl-plus-max-affine" if dim >= 2 => {
            let half = ScalarFunction::quadratic(
                nalgebra::DMatrix::identity(dim, dim) * 0.5,
                Vector::zeros(dim),
                0.0,
            );
            (
                "bowl-plus-max-affine",
                ScalarFunction::sum(vec![half, max_affine(dim)]),
                false,
                vec![],
            )
        }
        "restricted-bowl" => (
            "restricted-bowl",
            ScalarFunction::shifted_bowl(&shift).restricted(Vector::zeros(dim), 10.0),
            true,
            vec![shift.clone()],
        ),
        _ => return None,
    };
    let convex = function.is_convex();
    Some(CatalogEntry {
        name,
        function,
        smooth,
        convex,
        local_minimizers,
    })
}

pub fn catalog_all(dim: usize) -> Vec<CatalogEntry> {
    CATALOG_NAMES.iter().filter_map(|n| catalog(n, dim)).collect()
}
