//! Axis-aligned bounding-box hierarchy with median splits.

use crate::geom::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub lo: Vec3,
    pub hi: Vec3,
}

impl Aabb {
    pub fn empty() -> Self {
        Self { lo: Vec3::repeat(f64::INFINITY), hi: Vec3::repeat(f64::NEG_INFINITY) }
    }

    pub fn of_points(pts: &[Vec3], pad: f64) -> Self {
        let mut b = Self::empty();
        for p in pts {
            b.lo = b.lo.inf(p);
            b.hi = b.hi.sup(p);
        }
        b.lo.add_scalar_mut(-pad);
        b.hi.add_scalar_mut(pad);
        b
    }

    pub fn union(&self, o: &Aabb) -> Aabb {
        Aabb { lo: self.lo.inf(&o.lo), hi: self.hi.sup(&o.hi) }
    }

    pub fn overlaps(&self, o: &Aabb) -> bool {
        self.lo.x <= o.hi.x
            && o.lo.x <= self.hi.x
            && self.lo.y <= o.hi.y
            && o.lo.y <= self.hi.y
            && self.lo.z <= o.hi.z
            && o.lo.z <= self.hi.z
    }

    fn center(&self) -> Vec3 {
        (self.lo + self.hi) / 2.0
    }
}

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone)]
enum Node {
    Leaf { bbox: Aabb, start: usize, end: usize },
    Inner { bbox: Aabb, left: usize, right: usize },
}

impl Node {
    fn bbox(&self) -> &Aabb {
        match self {
            Node::Leaf { bbox, .. } | Node::Inner { bbox, .. } => bbox,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    items: Vec<u32>,
    boxes: Vec<Aabb>,
}

impl Bvh {
    pub fn build(boxes: Vec<Aabb>) -> Self {
        let mut bvh = Bvh { nodes: Vec::new(), items: (0..boxes.len() as u32).collect(), boxes };
        if !bvh.boxes.is_empty() {
            let n = bvh.items.len();
            bvh.build_node(0, n);
        }
        bvh
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let bbox = self.items[start..end].iter().fold(Aabb::empty(), |b, &i| b.union(&self.boxes[i as usize]));
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { bbox, start, end });
            return id;
        }
        self.nodes.push(Node::Leaf { bbox, start, end });
        let centers = self.items[start..end].iter().fold(Aabb::empty(), |b, &i| {
            let c = self.boxes[i as usize].center();
            b.union(&Aabb { lo: c, hi: c })
        });
        let axis = (centers.hi - centers.lo).imax();
        let mid = (start + end) / 2;
        let boxes = &self.boxes;
        self.items[start..end].select_nth_unstable_by(mid - start, |&p, &q| {
            boxes[p as usize].center()[axis].total_cmp(&boxes[q as usize].center()[axis]).then(p.cmp(&q))
        });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Inner { bbox, left, right };
        id
    }

    /// Appends every item whose box overlaps `query`.
    pub fn query(&self, query: &Aabb, out: &mut Vec<u32>) {
        if self.nodes.is_empty() {
            return;
        }
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if !node.bbox().overlaps(query) {
                continue;
            }
            match *node {
                Node::Leaf { start, end, .. } => {
                    out.extend(self.items[start..end].iter().filter(|&&i| self.boxes[i as usize].overlaps(query)));
                }
                Node::Inner { left, right, .. } => {
                    stack.push(left);
                    stack.push(right);
                }
            }
        }
    }
}
