//! Error type shared by all solvers.

/// Errors reported by the geometry, solver, and experiment layers.
///
/// The CLI maps these onto its exit codes: no-convergence -> 3, degenerate
/// immersion -> 4, near-singular length -> 5; everything else is a plain failure.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is outside the domain stated in the operation's contract.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    /// The first fundamental form lost positivity at a grid node, so the point
    /// set no longer describes an immersed surface.
    #[error("degenerate immersion: metric determinant {det:.3e} at node ({i}, {j})")]
    DegenerateImmersion { i: usize, j: usize, det: f64 },

    /// A mode-0 Dirichlet solve was requested on an interval whose half-length is
    /// within `margin` of the singular length, where the problem loses injectivity.
    #[error("half-length {l:.6} is within {margin:.1e} of the singular length {l_star:.6}")]
    NearSingularLength { l: f64, l_star: f64, margin: f64 },

    /// Input carries Fourier content on modes it must not have.
    #[error("unexpected mode content: modes {modes:?} carry {norm:.3e} (tolerance {tol:.1e})")]
    ModeContent {
        modes: Vec<i64>,
        norm: f64,
        tol: f64,
    },

    /// An iteration failed to reach its tolerance within the iteration budget.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e}, tolerance {tol:.1e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        tol: f64,
    },

    /// The signature normalization system is numerically singular.
    #[error("signature system ill-conditioned (condition number {cond:.3e})")]
    SingularSystem { cond: f64 },

    /// A pullback asked for a radius outside the unit disk.
    #[error("pullback radius {r:.6} lies outside the unit disk")]
    InterpolationRange { r: f64 },

    /// A one-dimensional root search failed to bracket or converge.
    #[error("root finding failed: {0}")]
    RootFind(String),

    /// Two fields that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
