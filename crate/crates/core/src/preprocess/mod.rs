//! Frame preprocessing and the feature chain.
//!
//! A frame is resized, min-max normalised, converted to grayscale and
//! Gaussian-blurred. Features per frame are the concatenation of a pooled
//! ear-region embedding, ear geometry attributes and PCA appearance
//! coefficients.

mod ear;
mod features;
mod frame;
pub mod io;
mod pca;

pub use ear::{
    curvature_features, ear_attributes, ear_size_features, fit_ellipse, BoundingBox,
    CurvatureSummary, EarRegion, Ellipse, Landmark, EAR_ATTRIBUTE_NAMES,
};
pub use features::{build_feature_vector, crop_patch, pooled_ear_embedding, FeatureVector};
pub use frame::{
    gaussian_blur, gaussian_kernel, min_max_normalize, resize, to_grayscale, FrameBuffer,
    DEFAULT_BLUR_RADIUS, DEFAULT_BLUR_SIGMA, TARGET_SIZE,
};
pub use pca::{pca_fit, pca_project, PcaModel};
