//! Voxel-world volumetric image synthesis.
//!
//! Objects are voxelized from analytic primitives and placed into a dense [`WorldGrid`]. An
//! observer's display volume is then filled by discrete ray tracing through the grid: each sight
//! ray stops at the first object voxel, which is shaded with shadow rays towards point lights
//! and one reflected and one refracted secondary ray.

pub mod error;
pub mod grid;
pub mod io;
pub mod material;
pub mod math;
pub mod shading;
pub mod synthesis;
pub mod traversal;
pub mod voxelizer;

pub use error::{Error, Result};
pub use grid::{GridCoord, Lattice, ObjectId, WorldGrid};
pub use material::{Characteristic, Light};
pub use math::{Pose, Rgb, Vec3};
