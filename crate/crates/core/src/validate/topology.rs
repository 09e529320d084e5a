use serde::{Deserialize, Serialize};

/// Counts for one connected component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentTopology {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub watertight: bool,
    pub oriented: bool,
    pub genus: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyReport {
    /// Vertices referenced by at least one triangle.
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    /// Every edge is used by exactly two triangles.
    pub watertight: bool,
    pub boundary_edges: usize,
    /// Edges used by three or more triangles.
    pub nonmanifold_edges: usize,
    /// Every interior edge is traversed once in each direction.
    pub oriented: bool,
    pub connected: bool,
    /// Defined only for a connected, oriented, watertight mesh.
    pub genus: Option<i64>,
    pub components: Vec<ComponentTopology>,
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            let p = self.0[x as usize];
            self.0[x as usize] = self.0[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb) as usize] = ra.min(rb);
        }
    }
}

fn genus(euler: i64, watertight: bool, oriented: bool) -> Option<i64> {
    (watertight && oriented && (2 - euler) % 2 == 0).then_some((2 - euler) / 2)
}

/// Edge-use audit, Euler characteristic and genus, overall and per
/// connected component.
pub fn topology(n_vertices: usize, triangles: &[[u32; 3]]) -> TopologyReport {
    // (low, high, +1 when traversed low→high)
    let mut uses: Vec<(u32, u32, i8)> = Vec::with_capacity(3 * triangles.len());
    let mut uf = UnionFind((0..n_vertices as u32).collect());
    let mut referenced = vec![false; n_vertices];
    for t in triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            referenced[a as usize] = true;
            if a == b {
                continue;
            }
            uses.push((a.min(b), a.max(b), if a < b { 1 } else { -1 }));
            uf.union(a, b);
        }
    }
    uses.sort_unstable();

    let root_of: Vec<u32> = (0..n_vertices as u32).map(|v| uf.find(v)).collect();
    let mut comp_index = vec![usize::MAX; n_vertices];
    let mut comps: Vec<(usize, usize, usize, bool, bool)> = Vec::new();
    for v in 0..n_vertices {
        if !referenced[v] {
            continue;
        }
        let r = root_of[v] as usize;
        if comp_index[r] == usize::MAX {
            comp_index[r] = comps.len();
            comps.push((0, 0, 0, true, true));
        }
        comps[comp_index[r]].0 += 1;
    }
    for t in triangles {
        comps[comp_index[root_of[t[0] as usize] as usize]].2 += 1;
    }

    let (mut edges, mut boundary, mut nonmanifold, mut oriented) = (0, 0, 0, true);
    let mut i = 0;
    while i < uses.len() {
        let mut j = i;
        let mut dir = 0i64;
        while j < uses.len() && uses[j].0 == uses[i].0 && uses[j].1 == uses[i].1 {
            dir += uses[j].2 as i64;
            j += 1;
        }
        let count = j - i;
        let c = &mut comps[comp_index[root_of[uses[i].0 as usize] as usize]];
        edges += 1;
        c.1 += 1;
        match count {
            1 => {
                boundary += 1;
                c.3 = false;
            }
            2 => {
                if dir != 0 {
                    oriented = false;
                    c.4 = false;
                }
            }
            _ => {
                nonmanifold += 1;
                c.3 = false;
            }
        }
        i = j;
    }

    let components: Vec<ComponentTopology> = comps
        .iter()
        .map(|&(v, e, f, w, o)| {
            let euler = v as i64 - e as i64 + f as i64;
            ComponentTopology {
                vertices: v,
                edges: e,
                faces: f,
                euler_characteristic: euler,
                watertight: w,
                oriented: o,
                genus: genus(euler, w, o),
            }
        })
        .collect();
    let vertices = referenced.iter().filter(|r| **r).count();
    let euler = vertices as i64 - edges as i64 + triangles.len() as i64;
    let watertight = boundary == 0 && nonmanifold == 0 && !triangles.is_empty();
    let connected = components.len() == 1;
    TopologyReport {
        vertices,
        edges,
        faces: triangles.len(),
        euler_characteristic: euler,
        watertight,
        boundary_edges: boundary,
        nonmanifold_edges: nonmanifold,
        oriented,
        connected,
        genus: if connected { genus(euler, watertight, oriented) } else { None },
        components,
    }
}
