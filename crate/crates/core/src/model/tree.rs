use std::collections::HashMap;

/// Index of a node inside a [`Tree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) usize);

#[derive(Debug, Clone)]
pub(crate) struct TreeNode {
    pub(crate) name: String,
    pub(crate) path: String,
    pub(crate) description: String,
    pub(crate) parent: Option<NodeId>,
    pub(crate) children: Vec<NodeId>,
}

/// An ordered tree of named nodes addressed by slash-separated paths.
///
/// Node 0 is always the root. Sibling order is insertion order.
#[derive(Debug, Clone)]
pub struct Tree {
    nodes: Vec<TreeNode>,
    by_path: HashMap<String, NodeId>,
}

impl Tree {
    pub(crate) fn new(root: &str) -> Self {
        let mut by_path = HashMap::new();
        by_path.insert(root.to_string(), NodeId(0));
        Tree {
            nodes: vec![TreeNode {
                name: root.to_string(),
                path: root.to_string(),
                description: String::new(),
                parent: None,
                children: Vec::new(),
            }],
            by_path,
        }
    }

    pub(crate) fn insert(&mut self, parent: NodeId, name: &str, description: &str) -> NodeId {
        let id = NodeId(self.nodes.len());
        let path = format!("{}/{}", self.nodes[parent.0].path, name);
        self.by_path.insert(path.clone(), id);
        self.nodes.push(TreeNode {
            name: name.to_string(),
            path,
            description: description.to_string(),
            parent: Some(parent),
            children: Vec::new(),
        });
        self.nodes[parent.0].children.push(id);
        id
    }

    pub fn root(&self) -> NodeRef<'_> {
        self.node(NodeId(0))
    }

    pub fn node(&self, id: NodeId) -> NodeRef<'_> {
        NodeRef { tree: self, id }
    }

    pub fn find(&self, path: &str) -> Option<NodeRef<'_>> {
        self.by_path.get(path).map(|&id| self.node(id))
    }

    pub fn contains(&self, path: &str) -> bool {
        self.by_path.contains_key(path)
    }

    /// Number of nodes, root included.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Pre-order depth-first traversal starting at the root.
    pub fn depth_first(&self) -> Vec<NodeRef<'_>> {
        self.root().subtree()
    }

    /// Leaves other than the root, in depth-first order.
    pub fn atomic_nodes(&self) -> Vec<NodeRef<'_>> {
        self.depth_first().into_iter().filter(|n| n.is_atomic()).collect()
    }

    /// True when `path` is `ancestor` or lies below it.
    pub fn is_within(&self, path: &str, ancestor: &str) -> bool {
        let Some(mut node) = self.find(path) else {
            return false;
        };
        loop {
            if node.path() == ancestor {
                return true;
            }
            match node.parent() {
                Some(p) => node = p,
                None => return false,
            }
        }
    }
}

/// Borrowed view of one tree node.
#[derive(Clone, Copy)]
pub struct NodeRef<'a> {
    tree: &'a Tree,
    id: NodeId,
}

impl<'a> NodeRef<'a> {
    fn raw(&self) -> &'a TreeNode {
        &self.tree.nodes[self.id.0]
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn name(&self) -> &'a str {
        &self.raw().name
    }

    pub fn path(&self) -> &'a str {
        &self.raw().path
    }

    pub fn description(&self) -> &'a str {
        &self.raw().description
    }

    pub fn parent(&self) -> Option<NodeRef<'a>> {
        self.raw().parent.map(|p| self.tree.node(p))
    }

    pub fn children(&self) -> impl Iterator<Item = NodeRef<'a>> + 'a {
        let tree = self.tree;
        self.raw().children.iter().map(move |&c| tree.node(c))
    }

    pub fn child_count(&self) -> usize {
        self.raw().children.len()
    }

    pub fn is_root(&self) -> bool {
        self.raw().parent.is_none()
    }

    pub fn is_leaf(&self) -> bool {
        self.raw().children.is_empty()
    }

    /// Leaf nodes below the root. The root itself is never atomic.
    pub fn is_atomic(&self) -> bool {
        self.is_leaf() && !self.is_root()
    }

    /// Root is depth 1.
    pub fn depth(&self) -> usize {
        let mut d = 1;
        let mut cur = self.raw().parent;
        while let Some(p) = cur {
            d += 1;
            cur = self.tree.nodes[p.0].parent;
        }
        d
    }

    /// This node and its ancestors, nearest first.
    pub fn ancestors_inclusive(&self) -> Vec<NodeRef<'a>> {
        let mut out = vec![*self];
        let mut cur = self.parent();
        while let Some(p) = cur {
            out.push(p);
            cur = p.parent();
        }
        out
    }

    /// Pre-order traversal of the subtree rooted here.
    pub fn subtree(&self) -> Vec<NodeRef<'a>> {
        let mut out = Vec::new();
        let mut stack = vec![self.id];
        while let Some(id) = stack.pop() {
            out.push(self.tree.node(id));
            stack.extend(self.tree.nodes[id.0].children.iter().rev());
        }
        out
    }
}

impl std::fmt::Debug for NodeRef<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_tuple("NodeRef").field(&self.path()).finish()
    }
}

impl PartialEq for Tree {
    /// Structural equality: same paths, descriptions and sibling order.
    fn eq(&self, other: &Self) -> bool {
        let a = self.depth_first();
        let b = other.depth_first();
        a.len() == b.len()
            && a.iter().zip(&b).all(|(x, y)| {
                x.path() == y.path()
                    && x.description() == y.description()
                    && x.child_count() == y.child_count()
            })
    }
}

impl Eq for Tree {}
