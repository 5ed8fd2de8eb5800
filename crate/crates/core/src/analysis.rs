use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::surface::{ConeData, CornerRef, EdgeRef, SurfaceComplex, VertexClass};

/// A complex together with the combinatorial data the engines query
/// repeatedly: edge partners, gluing translations, corner classes and the
/// singular set.
#[derive(Clone, Debug)]
pub struct Surface {
    complex: SurfaceComplex,
    partner: Vec<Vec<Option<EdgeRef>>>,
    translation: Vec<Vec<Option<Vec2>>>,
    classes: Vec<VertexClass>,
    class_of: Vec<Vec<usize>>,
    cones: Vec<ConeData>,
    singular: Vec<bool>,
}

impl Surface {
    /// Classes with `k != 1` or on the boundary are singular.
    pub fn new(complex: SurfaceComplex) -> Self {
        let partner = complex.partner_table();
        let translation = partner
            .iter()
            .enumerate()
            .map(|(p, row)| {
                row.iter()
                    .enumerate()
                    .map(|(e, q)| q.map(|q| complex.gluing_translation(EdgeRef::new(p, e), q)))
                    .collect()
            })
            .collect();
        let classes = complex.vertex_classes();
        let mut class_of: Vec<Vec<usize>> = complex.polygons.iter().map(|p| vec![0; p.len()]).collect();
        for class in &classes {
            for c in &class.corners {
                class_of[c.polygon][c.vertex] = class.class_id;
            }
        }
        let cones: Vec<ConeData> = classes.iter().map(|c| complex.cone_data(c)).collect();
        let singular = cones.iter().map(|c| c.multiplicity() != Some(1)).collect();
        Surface {
            complex,
            partner,
            translation,
            classes,
            class_of,
            cones,
            singular,
        }
    }

    /// Same as [`Surface::new`] with extra classes treated as singular.
    pub fn with_marked(complex: SurfaceComplex, marked: &[usize]) -> Result<Self> {
        let mut s = Surface::new(complex);
        for &m in marked {
            s.mark(m)?;
        }
        Ok(s)
    }

    pub fn mark(&mut self, class: usize) -> Result<()> {
        let slot = self.singular.get_mut(class).ok_or(Error::UnknownClass(class))?;
        *slot = true;
        Ok(())
    }

    pub fn complex(&self) -> &SurfaceComplex {
        &self.complex
    }

    pub fn into_complex(self) -> SurfaceComplex {
        self.complex
    }

    pub fn partner(&self, e: EdgeRef) -> Option<EdgeRef> {
        self.partner[e.polygon][e.edge]
    }

    /// Translation carrying edge `e` onto its partner.
    pub fn translation(&self, e: EdgeRef) -> Option<&Vec2> {
        self.translation[e.polygon][e.edge].as_ref()
    }

    pub fn classes(&self) -> &[VertexClass] {
        &self.classes
    }

    pub fn class_of(&self, c: CornerRef) -> usize {
        self.class_of[c.polygon][c.vertex]
    }

    pub fn cone(&self, class: usize) -> Result<&ConeData> {
        self.cones.get(class).ok_or(Error::UnknownClass(class))
    }

    pub fn cones(&self) -> &[ConeData] {
        &self.cones
    }

    pub fn is_singular(&self, class: usize) -> bool {
        self.singular.get(class).copied().unwrap_or(false)
    }

    pub fn is_singular_corner(&self, c: CornerRef) -> bool {
        self.singular[self.class_of(c)]
    }

    pub fn singular_classes(&self) -> Vec<usize> {
        (0..self.singular.len()).filter(|&c| self.singular[c]).collect()
    }

    pub fn check_class(&self, class: usize) -> Result<()> {
        if class < self.classes.len() {
            Ok(())
        } else {
            Err(Error::UnknownClass(class))
        }
    }
}
