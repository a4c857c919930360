//! Planar convex cones, projections, and the case geometries built on them.

mod cone;
mod geometry;

pub use cone::{lrs_between, lrs_quadratic, Cone2};
pub use geometry::{
    audit_selfliang, region_statistic, region_statistic_selfliang, selfliang_literal, Angles,
    CaseGeometry, CaseId, Region, RegionLabel, SelfLiangAudit,
};
