//! The periodic `L x L` square lattice of the DK encoding.
//!
//! Vertex `(x, y)` has id `y * L + x`; `y` grows upwards. Face `(x, y)` is the
//! unit square whose lower-left corner is vertex `(x, y)` and has the same id.
//! Faces are two-coloured like a checkerboard: blue iff `x + y` is even (the
//! parity can be flipped for symmetry tests). Qubits `0..L^2` sit on vertices
//! and qubits `L^2..3L^2/2` on blue faces, both in row-major order.
//!
//! Edge `2 * v` is the horizontal edge from vertex `v = (x, y)` to `(x+1, y)`
//! and edge `2 * v + 1` the vertical edge from `(x, y)` to `(x, y+1)`.
//! Horizontal edges point right in even rows and left in odd rows; vertical
//! edges point up in even columns and down in odd columns.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Right,
    Left,
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaceColor {
    Red,
    Blue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: usize,
    /// Oriented endpoints: the edge points from `tail` to `head`.
    pub tail: usize,
    pub head: usize,
    pub orientation: Orientation,
}

impl Edge {
    pub fn is_horizontal(&self) -> bool {
        matches!(self.orientation, Orientation::Right | Orientation::Left)
    }
}

/// Boundary of a red face, listed clockwise from the upper-left corner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedFaceBoundary {
    pub face: usize,
    /// Upper-left, upper-right, lower-right, lower-left.
    pub corners: [usize; 4],
    /// Top, right, bottom, left edges.
    pub edges: [usize; 4],
    /// Blue faces to the left and right.
    pub horizontal_neighbors: [usize; 2],
    /// Blue faces above and below.
    pub vertical_neighbors: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareLattice {
    l: usize,
    blue_parity: usize,
    edges: Vec<Edge>,
    red_faces: Vec<usize>,
    blue_faces: Vec<usize>,
}

impl SquareLattice {
    pub fn new(l: usize) -> Result<Self> {
        Self::with_parity(l, false)
    }

    /// Builds the lattice; `flipped` swaps the two face colours. The vertical
    /// orientations are flipped with them, which amounts to translating the
    /// whole construction by one column.
    pub fn with_parity(l: usize, flipped: bool) -> Result<Self> {
        if l < 2 || l % 2 != 0 {
            return Err(Error::InvalidLattice(l));
        }
        let blue_parity = usize::from(flipped);
        let mut edges = Vec::with_capacity(2 * l * l);
        for y in 0..l {
            for x in 0..l {
                let v = y * l + x;
                let right = y * l + (x + 1) % l;
                let up = ((y + 1) % l) * l + x;
                edges.push(if y % 2 == 0 {
                    Edge { id: 2 * v, tail: v, head: right, orientation: Orientation::Right }
                } else {
                    Edge { id: 2 * v, tail: right, head: v, orientation: Orientation::Left }
                });
                edges.push(if (x + blue_parity) % 2 == 0 {
                    Edge { id: 2 * v + 1, tail: v, head: up, orientation: Orientation::Up }
                } else {
                    Edge { id: 2 * v + 1, tail: up, head: v, orientation: Orientation::Down }
                });
            }
        }
        let (blue_faces, red_faces) = (0..l * l).partition(|&f| (f / l + f % l) % 2 == blue_parity);
        Ok(SquareLattice { l, blue_parity, edges, red_faces, blue_faces })
    }

    pub fn side(&self) -> usize {
        self.l
    }

    pub fn num_vertices(&self) -> usize {
        self.l * self.l
    }

    pub fn num_qubits(&self) -> usize {
        self.l * self.l + self.l * self.l / 2
    }

    /// Wraps a signed coordinate onto `0..L`.
    pub fn wrap(&self, c: isize) -> usize {
        c.rem_euclid(self.l as isize) as usize
    }

    pub fn id(&self, x: isize, y: isize) -> usize {
        self.wrap(y) * self.l + self.wrap(x)
    }

    pub fn coords(&self, id: usize) -> (usize, usize) {
        (id % self.l, id / self.l)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    /// The edge joining two adjacent vertices, in either direction.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<&Edge> {
        let (ax, ay) = self.coords(a);
        let (ax, ay) = (ax as isize, ay as isize);
        [self.id(ax, ay), self.id(ax - 1, ay), self.id(ax, ay - 1)]
            .into_iter()
            .flat_map(|v| [2 * v, 2 * v + 1])
            .map(|e| &self.edges[e])
            .find(|e| (e.tail == a && e.head == b) || (e.tail == b && e.head == a))
    }

    pub fn face_color(&self, face: usize) -> FaceColor {
        let (x, y) = self.coords(face);
        if (x + y) % 2 == self.blue_parity {
            FaceColor::Blue
        } else {
            FaceColor::Red
        }
    }

    pub fn red_faces(&self) -> &[usize] {
        &self.red_faces
    }

    pub fn blue_faces(&self) -> &[usize] {
        &self.blue_faces
    }

    /// Position of a red face in [`Self::red_faces`] (the stabilizer index).
    pub fn red_index(&self, face: usize) -> Option<usize> {
        self.red_faces.binary_search(&face).ok()
    }

    pub fn vertex_qubit(&self, v: usize) -> usize {
        v
    }

    /// Qubit of a blue face.
    pub fn face_qubit(&self, face: usize) -> Result<usize> {
        if face >= self.l * self.l {
            return Err(Error::IndexOutOfRange { index: face, len: self.l * self.l });
        }
        if self.face_color(face) != FaceColor::Blue {
            return Err(Error::InvalidInstruction(format!("face {face} is red and carries no qubit")));
        }
        Ok(self.l * self.l + face / 2)
    }

    /// The two faces an edge separates, as (face on the left or above,
    /// face on the right or below) in lattice coordinates.
    fn edge_faces(&self, edge: usize) -> (usize, usize) {
        let v = edge / 2;
        let (x, y) = self.coords(v);
        let (x, y) = (x as isize, y as isize);
        if edge % 2 == 0 {
            (self.id(x, y), self.id(x, y - 1))
        } else {
            (self.id(x - 1, y), self.id(x, y))
        }
    }

    /// The unique blue face bordering an edge.
    pub fn face_of_edge(&self, edge: usize) -> usize {
        let (a, b) = self.edge_faces(edge);
        if self.face_color(a) == FaceColor::Blue {
            a
        } else {
            b
        }
    }

    /// The unique red face bordering an edge.
    pub fn red_face_of_edge(&self, edge: usize) -> usize {
        let (a, b) = self.edge_faces(edge);
        if self.face_color(a) == FaceColor::Red {
            a
        } else {
            b
        }
    }

    pub fn red_face_boundary(&self, face: usize) -> Result<RedFaceBoundary> {
        if face >= self.l * self.l {
            return Err(Error::IndexOutOfRange { index: face, len: self.l * self.l });
        }
        if self.face_color(face) != FaceColor::Red {
            return Err(Error::InvalidInstruction(format!("face {face} is blue, not red")));
        }
        let (x, y) = self.coords(face);
        let (x, y) = (x as isize, y as isize);
        let ul = self.id(x, y + 1);
        let ur = self.id(x + 1, y + 1);
        let lr = self.id(x + 1, y);
        let ll = self.id(x, y);
        Ok(RedFaceBoundary {
            face,
            corners: [ul, ur, lr, ll],
            edges: [2 * ul, 2 * lr + 1, 2 * ll, 2 * ll + 1],
            horizontal_neighbors: [self.id(x - 1, y), self.id(x + 1, y)],
            vertical_neighbors: [self.id(x, y + 1), self.id(x, y - 1)],
        })
    }

    /// Nearest-neighbour vertex pairs, one per edge, in edge order.
    pub fn neighbor_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.tail.min(e.head), e.tail.max(e.head))).collect()
    }

    /// Text table of vertices, faces and edges.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let l = self.l;
        let _ = writeln!(s, "# lattice L={l} qubits={}", self.num_qubits());
        let _ = writeln!(s, "# vertex id x y qubit");
        for v in 0..l * l {
            let (x, y) = self.coords(v);
            let _ = writeln!(s, "vertex {v} {x} {y} {v}");
        }
        let _ = writeln!(s, "# face id x y color qubit");
        for f in 0..l * l {
            let (x, y) = self.coords(f);
            match self.face_color(f) {
                FaceColor::Blue => {
                    let _ = writeln!(s, "face {f} {x} {y} blue {}", self.face_qubit(f).unwrap_or(0));
                }
                FaceColor::Red => {
                    let _ = writeln!(s, "face {f} {x} {y} red -");
                }
            }
        }
        let _ = writeln!(s, "# edge id tail head orientation blue_face");
        for e in &self.edges {
            let _ = writeln!(
                s,
                "edge {} {} {} {:?} {}",
                e.id,
                e.tail,
                e.head,
                e.orientation,
                self.face_of_edge(e.id)
            );
        }
        s
    }
}
