use std::f64::consts::PI;
use std::io::{self, Read, Write};

/// Leading bytes of a binary grid dump.
pub const GRID_MAGIC: &[u8; 8] = b"KRGRID01";
const HEADER_LEN: usize = 32;

/// Extent and resolution of a phase-space grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nq: usize,
    pub np: usize,
    pub p_center: f64,
    pub p_extent: f64,
}

impl GridSpec {
    pub fn p_min(&self) -> f64 {
        self.p_center - self.p_extent
    }

    pub fn p_max(&self) -> f64 {
        self.p_center + self.p_extent
    }
}

/// Samples of f(q, p) on q ∈ [0, 2π) (periodic, `nq` points) times
/// p ∈ [p_min, p_max] (`np` points, endpoints included).
///
/// Stored row-major by momentum: `values[j * nq + i] = f(q_i, p_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceGrid {
    pub nq: usize,
    pub np: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub hbar: f64,
    pub values: Vec<f64>,
}

impl PhaseSpaceGrid {
    pub fn zeros(spec: &GridSpec, hbar: f64) -> Self {
        Self {
            nq: spec.nq,
            np: spec.np,
            p_min: spec.p_min(),
            p_max: spec.p_max(),
            hbar,
            values: vec![0.0; spec.nq * spec.np],
        }
    }

    pub fn dq(&self) -> f64 {
        2.0 * PI / self.nq as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn q(&self, i: usize) -> f64 {
        i as f64 * self.dq()
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp()
    }

    pub fn p_axis(&self) -> Vec<f64> {
        (0..self.np).map(|j| self.p(j)).collect()
    }

    /// Cell measure ΔqΔp/(2πħ).
    pub fn cell(&self) -> f64 {
        self.dq() * self.dp() / (2.0 * PI * self.hbar)
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nq + i]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.nq..(j + 1) * self.nq]
    }

    /// Σ f ΔqΔp/(2πħ).
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell()
    }

    /// Fraction of the mass held in the first and last p rows.
    pub fn boundary_mass(&self) -> f64 {
        let edge: f64 = self.row(0).iter().chain(self.row(self.np - 1)).sum();
        edge * self.cell() / self.mass()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }

    /// Writes the 32-byte header (magic, nq, np as u32, p_min, p_max as f64,
    /// all little-endian) followed by the row-major values.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        let too_big = |n: usize| {
            u32::try_from(n)
                .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "grid too large"))
        };
        w.write_all(GRID_MAGIC)?;
        w.write_all(&too_big(self.nq)?.to_le_bytes())?;
        w.write_all(&too_big(self.np)?.to_le_bytes())?;
        w.write_all(&self.p_min.to_le_bytes())?;
        w.write_all(&self.p_max.to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.values.len() * 8);
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)
    }

    /// Reads a dump written by [`write_binary`](Self::write_binary). The
    /// header does not carry ħ, so it is supplied by the caller.
    pub fn read_binary<R: Read>(mut r: R, hbar: f64) -> io::Result<Self> {
        let bad = |msg: &str| io::Error::new(io::ErrorKind::InvalidData, msg.to_string());
        let mut header = [0u8; HEADER_LEN];
        r.read_exact(&mut header)?;
        if &header[..8] != GRID_MAGIC {
            return Err(bad("not a grid dump"));
        }
        let nq = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let np = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
        let p_min = f64::from_le_bytes(header[16..24].try_into().unwrap());
        let p_max = f64::from_le_bytes(header[24..32].try_into().unwrap());
        if nq == 0 || np < 2 || !(p_max > p_min) {
            return Err(bad("inconsistent grid header"));
        }
        let mut bytes = vec![0u8; nq * np * 8];
        r.read_exact(&mut bytes)?;
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self {
            nq,
            np,
            p_min,
            p_max,
            hbar,
            values,
        })
    }
}
