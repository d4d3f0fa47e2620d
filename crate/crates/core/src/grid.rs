//! The voxelized world: a dense grid of scene voxels holding the medium and placed objects.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::material::Characteristic;
use crate::math::Vec3;

/// Identifier of a placed object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectId(pub u32);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Voxel indices `(l, m, n)` along X, Y and Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GridCoord {
    pub l: usize,
    pub m: usize,
    pub n: usize,
}

impl GridCoord {
    pub const fn new(l: usize, m: usize, n: usize) -> Self {
        Self { l, m, n }
    }

    pub fn to_array(self) -> [usize; 3] {
        [self.l, self.m, self.n]
    }

    /// Offsets by a signed delta, returning `None` if any index would go negative.
    pub fn offset(self, d: [i64; 3]) -> Option<GridCoord> {
        let l = usize::try_from(self.l as i64 + d[0]).ok()?;
        let m = usize::try_from(self.m as i64 + d[1]).ok()?;
        let n = usize::try_from(self.n as i64 + d[2]).ok()?;
        Some(GridCoord::new(l, m, n))
    }
}

impl From<[usize; 3]> for GridCoord {
    fn from(a: [usize; 3]) -> Self {
        GridCoord::new(a[0], a[1], a[2])
    }
}

/// An object voxel resampled into a scene cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occupant {
    pub object: ObjectId,
    material: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SceneVoxel {
    /// Extinction coefficient of the medium, per unit length.
    pub absorption: f64,
    pub occupant: Option<Occupant>,
}

/// Axis-aligned lattice of cubic cells: `dims` cells of edge `cell_size` starting at `origin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub dims: [usize; 3],
    pub cell_size: f64,
    pub origin: Vec3,
}

impl Lattice {
    pub fn new(dims: [usize; 3], cell_size: f64, origin: Vec3) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::range("dims", "every dimension must be positive"));
        }
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::range("cell_size", format!("{cell_size} is not > 0")));
        }
        if !origin.is_finite() {
            return Err(Error::range("origin", "must be finite"));
        }
        Ok(Self {
            dims,
            cell_size,
            origin,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    /// Linear index with `l` fastest.
    #[inline]
    pub fn index(&self, c: GridCoord) -> usize {
        c.l + self.dims[0] * (c.m + self.dims[1] * c.n)
    }

    #[inline]
    pub fn coord(&self, index: usize) -> GridCoord {
        let l = index % self.dims[0];
        let rest = index / self.dims[0];
        GridCoord::new(l, rest % self.dims[1], rest / self.dims[1])
    }

    #[inline]
    pub fn contains(&self, c: GridCoord) -> bool {
        c.l < self.dims[0] && c.m < self.dims[1] && c.n < self.dims[2]
    }

    #[inline]
    pub fn contains_signed(&self, c: [i64; 3]) -> bool {
        (0..3).all(|a| c[a] >= 0 && (c[a] as u64) < self.dims[a] as u64)
    }

    pub fn min_corner(&self) -> Vec3 {
        self.origin
    }

    pub fn max_corner(&self) -> Vec3 {
        self.origin
            + Vec3::new(
                self.dims[0] as f64,
                self.dims[1] as f64,
                self.dims[2] as f64,
            ) * self.cell_size
    }

    pub fn cell_center(&self, c: GridCoord) -> Vec3 {
        self.origin
            + Vec3::new(c.l as f64 + 0.5, c.m as f64 + 0.5, c.n as f64 + 0.5) * self.cell_size
    }

    /// Unbounded cell index of a point: `floor((p - origin) / cell_size)` per axis.
    #[inline]
    pub fn cell_of(&self, p: Vec3) -> [i64; 3] {
        let q = (p - self.origin) / self.cell_size;
        [q.x.floor() as i64, q.y.floor() as i64, q.z.floor() as i64]
    }

    /// Cell owning `p` under half-open cells; points on a max face are outside.
    pub fn locate(&self, p: Vec3) -> Option<GridCoord> {
        let c = self.cell_of(p);
        self.contains_signed(c)
            .then(|| GridCoord::new(c[0] as usize, c[1] as usize, c[2] as usize))
    }

    pub fn coords(&self) -> impl Iterator<Item = GridCoord> + '_ {
        (0..self.cell_count()).map(move |i| self.coord(i))
    }

    /// Inclusive index range of cells overlapping the box `[lo, hi]`, clipped to the lattice.
    pub fn cell_range(&self, lo: Vec3, hi: Vec3) -> Option<([usize; 3], [usize; 3])> {
        let a = self.cell_of(lo);
        let b = self.cell_of(hi);
        let mut min = [0usize; 3];
        let mut max = [0usize; 3];
        for axis in 0..3 {
            let lo_i = a[axis].max(0);
            let hi_i = b[axis].min(self.dims[axis] as i64 - 1);
            if lo_i > hi_i {
                return None;
            }
            min[axis] = lo_i as usize;
            max[axis] = hi_i as usize;
        }
        Some((min, max))
    }
}

/// The discretized world: medium absorption and object occupancy per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldGrid {
    lattice: Lattice,
    cells: Vec<SceneVoxel>,
    materials: Vec<Characteristic>,
    material_lookup: HashMap<[u64; 7], u32>,
}

impl WorldGrid {
    pub fn new(dims: [usize; 3], cell_size: f64, origin: Vec3) -> Result<Self> {
        let lattice = Lattice::new(dims, cell_size, origin)?;
        Ok(Self {
            cells: vec![SceneVoxel::default(); lattice.cell_count()],
            lattice,
            materials: Vec::new(),
            material_lookup: HashMap::new(),
        })
    }

    /// Sets the same medium absorption in every cell.
    pub fn with_absorption(mut self, absorption: f64) -> Result<Self> {
        check_absorption(absorption)?;
        for cell in &mut self.cells {
            cell.absorption = absorption;
        }
        Ok(self)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dims(&self) -> [usize; 3] {
        self.lattice.dims
    }

    pub fn cell_size(&self) -> f64 {
        self.lattice.cell_size
    }

    pub fn origin(&self) -> Vec3 {
        self.lattice.origin
    }

    pub fn cells(&self) -> &[SceneVoxel] {
        &self.cells
    }

    pub fn contains(&self, c: GridCoord) -> bool {
        self.lattice.contains(c)
    }

    pub fn world_to_grid(&self, p: Vec3) -> Option<GridCoord> {
        self.lattice.locate(p)
    }

    pub fn cell_center(&self, c: GridCoord) -> Vec3 {
        self.lattice.cell_center(c)
    }

    /// Panics if `c` is out of bounds.
    pub fn voxel(&self, c: GridCoord) -> &SceneVoxel {
        assert!(self.contains(c), "{c:?} outside grid {:?}", self.dims());
        &self.cells[self.lattice.index(c)]
    }

    pub fn absorption(&self, c: GridCoord) -> f64 {
        self.voxel(c).absorption
    }

    pub fn set_absorption(&mut self, c: GridCoord, absorption: f64) -> Result<()> {
        check_absorption(absorption)?;
        if !self.contains(c) {
            return Err(Error::CoordOutOfBounds(c.l, c.m, c.n));
        }
        let i = self.lattice.index(c);
        self.cells[i].absorption = absorption;
        Ok(())
    }

    #[inline]
    pub fn is_occupied(&self, c: GridCoord) -> bool {
        self.voxel(c).occupant.is_some()
    }

    /// Occupancy with out-of-range signed indices treated as empty.
    #[inline]
    pub fn is_occupied_signed(&self, c: [i64; 3]) -> bool {
        self.lattice.contains_signed(c)
            && self.cells[self.lattice.index(GridCoord::new(
                c[0] as usize,
                c[1] as usize,
                c[2] as usize,
            ))]
            .occupant
            .is_some()
    }

    pub fn occupant(&self, c: GridCoord) -> Option<(ObjectId, &Characteristic)> {
        self.voxel(c)
            .occupant
            .map(|o| (o.object, &self.materials[o.material as usize]))
    }

    pub fn occupant_of(&self, o: &Occupant) -> &Characteristic {
        &self.materials[o.material as usize]
    }

    pub fn set_occupant(&mut self, c: GridCoord, object: ObjectId, material: &Characteristic) {
        let material = self.intern(material);
        let i = self.lattice.index(c);
        self.cells[i].occupant = Some(Occupant { object, material });
    }

    pub fn clear_occupant(&mut self, c: GridCoord) {
        let i = self.lattice.index(c);
        self.cells[i].occupant = None;
    }

    /// Removes every occupant belonging to `object`.
    pub fn clear_object(&mut self, object: ObjectId) {
        for cell in &mut self.cells {
            if cell.occupant.is_some_and(|o| o.object == object) {
                cell.occupant = None;
            }
        }
    }

    pub fn clear_all_occupants(&mut self) {
        for cell in &mut self.cells {
            cell.occupant = None;
        }
    }

    pub fn occupied_coords(&self) -> impl Iterator<Item = GridCoord> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, v)| v.occupant.is_some())
            .map(|(i, _)| self.lattice.coord(i))
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|v| v.occupant.is_some()).count()
    }

    fn intern(&mut self, material: &Characteristic) -> u32 {
        let key = material.bits();
        if let Some(&i) = self.material_lookup.get(&key) {
            return i;
        }
        let i = self.materials.len() as u32;
        self.materials.push(*material);
        self.material_lookup.insert(key, i);
        i
    }
}

fn check_absorption(a: f64) -> Result<()> {
    if a >= 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::range(
            "absorption",
            format!("{a} is not a finite value >= 0"),
        ))
    }
}
