//! Built-in diagrams and surfaces used by the verification suite.

use crate::arc_diagram::ArcDiagram;
use crate::surface::{IntervalLabel, SurfaceComponent, SutureCircle, SuturedSurfaceType};

pub const D1: &str = include_str!("../corpus/d1.json");
pub const D2: &str = include_str!("../corpus/d2.json");
pub const D3: &str = include_str!("../corpus/d3.json");
pub const D4: &str = include_str!("../corpus/d4.json");
pub const D5: &str = include_str!("../corpus/d5.json");
pub const PANTS: &str = include_str!("../corpus/pants.json");
pub const DISK: &str = include_str!("../corpus/disk.json");
pub const ANNULUS: &str = include_str!("../corpus/annulus.json");

fn parse(text: &str) -> ArcDiagram {
    ArcDiagram::from_json(text).expect("built-in diagrams are valid")
}

/// D1 to D5, by name.
pub fn diagrams() -> Vec<(&'static str, ArcDiagram)> {
    vec![("D1", parse(D1)), ("D2", parse(D2)), ("D3", parse(D3)), ("D4", parse(D4)), ("D5", parse(D5))]
}

pub fn diagram(name: &str) -> Option<ArcDiagram> {
    diagrams().into_iter().find(|(n, _)| n.eq_ignore_ascii_case(name)).map(|(_, d)| d)
}

fn surface(text: &str) -> SuturedSurfaceType {
    SuturedSurfaceType::from_json(text).expect("built-in surfaces are valid")
}

/// Genus 0, one boundary circle with three `S₊` intervals.
pub fn pants() -> SuturedSurfaceType {
    surface(PANTS)
}

pub fn disk() -> SuturedSurfaceType {
    surface(DISK)
}

/// Two boundary circles, one `S₊` interval on each.
pub fn annulus() -> SuturedSurfaceType {
    surface(ANNULUS)
}

fn component(genus: usize, boundary: &[SutureCircle]) -> SurfaceComponent {
    SurfaceComponent { genus, boundary: boundary.to_vec() }
}

/// A self-gluing of two `S₊` intervals of one surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingCase {
    pub name: &'static str,
    pub surface: SuturedSurfaceType,
    pub i1: IntervalLabel,
    pub i2: IntervalLabel,
}

/// One self-gluing for each way two intervals can sit relative to each other.
pub fn gluing_cases() -> Vec<GluingCase> {
    use SutureCircle::Alternating as Alt;
    let l = IntervalLabel::new;
    vec![
        GluingCase {
            name: "distinct components",
            surface: annulus().disjoint_union(&annulus()),
            i1: l(0, 0, 0),
            i2: l(1, 1, 0),
        },
        GluingCase {
            name: "same circle, other intervals present",
            surface: SuturedSurfaceType { components: vec![component(0, &[Alt(3), Alt(1)])] },
            i1: l(0, 0, 0),
            i2: l(0, 0, 2),
        },
        GluingCase {
            name: "same circle, no other intervals",
            surface: SuturedSurfaceType { components: vec![component(1, &[Alt(2)])] },
            i1: l(0, 0, 0),
            i2: l(0, 0, 1),
        },
        GluingCase {
            name: "different circles, other intervals present",
            surface: SuturedSurfaceType { components: vec![component(0, &[Alt(2), Alt(1), Alt(1)])] },
            i1: l(0, 0, 1),
            i2: l(0, 1, 0),
        },
        GluingCase {
            name: "different circles, no other intervals",
            surface: annulus(),
            i1: l(0, 0, 0),
            i2: l(0, 1, 0),
        },
    ]
}
