//! JSON file formats. Every writer emits canonical ordering so output is byte-stable.

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use precat_core::category::ExplicitCategory;
use precat_core::presentation::{Element, PrecatMap, Presentation, Relation};
use precat_core::structure::Verdict;
use precat_core::svk::{ComboComplex, Edge, Letter};
use precat_core::table::Table;
use precat_core::theta::{Site, ThetaMorphism, ThetaObject};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const PRESENTATION: &str = "precat-presentation/v1";
pub const TABLE: &str = "precat-table/v1";
pub const MAP: &str = "precat-map/v1";
pub const STRICT_MODEL: &str = "strict-model/v1";
pub const COMPLEX: &str = "complex/v1";

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ElementJson {
    pub gen: usize,
    pub map: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct RelationJson {
    pub p: Vec<u8>,
    pub left: ElementJson,
    pub right: ElementJson,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct PresentationJson {
    #[serde(default = "presentation_tag")]
    pub format: String,
    pub n: u8,
    pub generators: Vec<Vec<u8>>,
    #[serde(default)]
    pub relations: Vec<RelationJson>,
}

fn presentation_tag() -> String {
    PRESENTATION.into()
}

fn element_json(e: &Element) -> ElementJson {
    ElementJson { gen: e.gen, map: e.map.to_text() }
}

fn element_from(n: u8, e: &ElementJson) -> Result<Element> {
    Ok(Element::new(e.gen, ThetaMorphism::parse(n, &e.map)?))
}

impl PresentationJson {
    pub fn from_presentation(p: &Presentation) -> Self {
        PresentationJson {
            format: PRESENTATION.into(),
            n: p.n(),
            generators: p.generators().iter().map(|g| g.comps().to_vec()).collect(),
            relations: p
                .relations()
                .iter()
                .map(|r| RelationJson { p: r.source.comps().to_vec(), left: element_json(&r.left), right: element_json(&r.right) })
                .collect(),
        }
    }

    pub fn to_presentation(&self) -> Result<Presentation> {
        check_tag(&self.format, PRESENTATION)?;
        let gens = self.generators.iter().map(|g| ThetaObject::new(self.n, g.clone())).collect::<Result<Vec<_>, _>>()?;
        let rels = self
            .relations
            .iter()
            .map(|r| {
                Ok(Relation {
                    source: ThetaObject::new(self.n, r.p.clone())?,
                    left: element_from(self.n, &r.left)?,
                    right: element_from(self.n, &r.right)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Presentation::new(self.n, gens, rels)?)
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct MapJson {
    #[serde(default = "map_tag")]
    pub format: String,
    pub source: PresentationJson,
    pub target: PresentationJson,
    pub images: Vec<ElementJson>,
}

fn map_tag() -> String {
    MAP.into()
}

impl MapJson {
    pub fn from_map(f: &PrecatMap) -> Self {
        MapJson {
            format: MAP.into(),
            source: PresentationJson::from_presentation(&f.source),
            target: PresentationJson::from_presentation(&f.target),
            images: f.images.iter().map(element_json).collect(),
        }
    }

    pub fn to_map(&self) -> Result<PrecatMap> {
        check_tag(&self.format, MAP)?;
        let source = self.source.to_presentation()?;
        let target = self.target.to_presentation()?;
        let images = self.images.iter().map(|e| element_from(target.n(), e)).collect::<Result<Vec<_>>>()?;
        Ok(PrecatMap::new(source, target, images)?)
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct LevelJson {
    pub object: Vec<u8>,
    pub size: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ActionJson {
    pub map: String,
    pub values: Vec<u32>,
}

/// A table: level sizes and, for every site morphism, the image of each element.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct TableJson {
    #[serde(default = "table_tag")]
    pub format: String,
    pub n: u8,
    pub bound: u32,
    pub levels: Vec<LevelJson>,
    pub action: Vec<ActionJson>,
}

fn table_tag() -> String {
    TABLE.into()
}

impl TableJson {
    pub fn from_table(t: &Table) -> Self {
        let site = t.site();
        TableJson {
            format: TABLE.into(),
            n: t.n(),
            bound: t.bound(),
            levels: site.objects().iter().enumerate().map(|(o, obj)| LevelJson { object: obj.comps().to_vec(), size: t.size(o) }).collect(),
            action: (0..site.morphism_count())
                .map(|f| ActionJson { map: site.morphism(f).to_text(), values: t.action_row(f).to_vec() })
                .collect(),
        }
    }

    pub fn to_table(&self) -> Result<Table> {
        check_tag(&self.format, TABLE)?;
        let site = Arc::new(Site::new(self.n, self.bound));
        let mut sizes = vec![usize::MAX; site.objects().len()];
        for l in &self.levels {
            let id = site.object_id(&ThetaObject::new(self.n, l.object.clone())?)?;
            sizes[id] = l.size;
        }
        if sizes.contains(&usize::MAX) {
            bail!("table is missing levels");
        }
        let mut rows = vec![None; site.morphism_count()];
        for a in &self.action {
            let id = site.morphism_id(&ThetaMorphism::parse(self.n, &a.map)?)?;
            rows[id] = Some(a.values.clone());
        }
        let rows = rows.into_iter().collect::<Option<Vec<_>>>().context("table is missing action rows")?;
        Ok(Table::from_parts(site, sizes, rows)?)
    }
}

/// Coefficient categories for cohomology, by preset or explicitly.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum CategorySpec {
    Cyclic(usize),
    Chain(usize),
    Discrete(usize),
    Indiscrete(usize),
    Explicit {
        objects: usize,
        /// `[source, target]` per arrow.
        arrows: Vec<[usize; 2]>,
        identities: Vec<usize>,
        /// `[g, f, g∘f]` for every composable pair.
        compose: Vec<[usize; 3]>,
    },
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct StrictModelJson {
    #[serde(default = "strict_tag")]
    pub format: String,
    pub category: CategorySpec,
}

fn strict_tag() -> String {
    STRICT_MODEL.into()
}

impl StrictModelJson {
    pub fn to_category(&self) -> Result<ExplicitCategory> {
        check_tag(&self.format, STRICT_MODEL)?;
        Ok(match &self.category {
            CategorySpec::Cyclic(k) if *k > 0 => ExplicitCategory::cyclic(*k),
            CategorySpec::Chain(k) => ExplicitCategory::chain(*k),
            CategorySpec::Discrete(k) => ExplicitCategory::discrete(*k),
            CategorySpec::Indiscrete(k) => ExplicitCategory::indiscrete(*k),
            CategorySpec::Cyclic(_) => bail!("a cyclic group needs a positive order"),
            CategorySpec::Explicit { objects, arrows, identities, compose } => {
                let ends: Vec<(usize, usize)> = arrows.iter().map(|a| (a[0], a[1])).collect();
                let table: std::collections::BTreeMap<(usize, usize), usize> =
                    compose.iter().map(|c| ((c[0], c[1]), c[2])).collect();
                let mut missing = None;
                let cat = ExplicitCategory::new(*objects, ends, identities.clone(), |g, f| match table.get(&(g, f)) {
                    Some(&h) => h,
                    None => {
                        missing = Some((g, f));
                        0
                    }
                });
                if let Some((g, f)) = missing {
                    bail!("composite of arrows {g} and {f} is not listed");
                }
                cat?
            }
        })
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct EdgeJson {
    pub name: String,
    pub source: String,
    pub target: String,
}

/// A combinatorial complex; faces are boundary words such as `"a b^-1"`.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ComplexJson {
    #[serde(default = "complex_tag")]
    pub format: String,
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<EdgeJson>,
    #[serde(default)]
    pub faces: Vec<String>,
}

fn complex_tag() -> String {
    COMPLEX.into()
}

impl ComplexJson {
    pub fn to_complex(&self) -> Result<ComboComplex> {
        check_tag(&self.format, COMPLEX)?;
        let v: Vec<&str> = self.vertices.iter().map(String::as_str).collect();
        let e: Vec<(&str, &str, &str)> =
            self.edges.iter().map(|e| (e.name.as_str(), e.source.as_str(), e.target.as_str())).collect();
        let f: Vec<&str> = self.faces.iter().map(String::as_str).collect();
        Ok(ComboComplex::from_names(&v, &e, &f)?)
    }

    pub fn from_complex(cx: &ComboComplex) -> Self {
        let word = |w: &[Letter]| {
            w.iter()
                .map(|l| {
                    let name = &cx.edges[l.edge].name;
                    if l.inverse {
                        format!("{name}^-1")
                    } else {
                        name.clone()
                    }
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        ComplexJson {
            format: COMPLEX.into(),
            vertices: cx.vertices.clone(),
            edges: cx
                .edges
                .iter()
                .map(|e: &Edge| EdgeJson {
                    name: e.name.clone(),
                    source: cx.vertices[e.source].clone(),
                    target: cx.vertices[e.target].clone(),
                })
                .collect(),
            faces: cx.faces.iter().map(|w| word(w)).collect(),
        }
    }
}

fn check_tag(found: &str, expected: &str) -> Result<()> {
    if found != expected {
        bail!("expected format {expected}, found {found}");
    }
    Ok(())
}

/// Any input file, told apart by its `format` tag.
#[derive(Debug, Clone)]
pub enum Artifact {
    Presentation(Presentation),
    Table(Table),
    Map(PrecatMap),
    Complex(ComboComplex),
    Category(ExplicitCategory),
}

pub fn parse_artifact(text: &str) -> Result<Artifact> {
    let v: Value = serde_json::from_str(text).context("not valid JSON")?;
    let tag = v.get("format").and_then(Value::as_str).unwrap_or(PRESENTATION).to_string();
    Ok(match tag.as_str() {
        PRESENTATION => Artifact::Presentation(serde_json::from_value::<PresentationJson>(v)?.to_presentation()?),
        TABLE => Artifact::Table(serde_json::from_value::<TableJson>(v)?.to_table()?),
        MAP => Artifact::Map(serde_json::from_value::<MapJson>(v)?.to_map()?),
        COMPLEX => Artifact::Complex(serde_json::from_value::<ComplexJson>(v)?.to_complex()?),
        STRICT_MODEL => Artifact::Category(serde_json::from_value::<StrictModelJson>(v)?.to_category()?),
        other => bail!("unknown format {other}"),
    })
}

pub fn read_artifact(path: &Path) -> Result<Artifact> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_artifact(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn verdict_json(v: &Verdict) -> Value {
    match v {
        Verdict::Yes => json!({ "verdict": "yes" }),
        Verdict::No(w) => json!({ "verdict": "no", "witness": w }),
        Verdict::Unknown(r) => json!({ "verdict": "unknown", "reason": r }),
    }
}

/// Level sizes keyed by object text, in site order.
pub fn census_json(t: &Table) -> Value {
    Value::Array(t.census().into_iter().map(|(o, k)| json!({ "level": o.to_string(), "size": k })).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use precat_core::standard::{phi, upsilon, SigmaShape};

    #[test]
    fn presentation_round_trip() {
        let p = upsilon(&ThetaObject::point(2), 2, 1).unwrap();
        let j = PresentationJson::from_presentation(&p);
        let text = to_pretty(&j);
        let back: PresentationJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_presentation().unwrap(), p);
    }

    #[test]
    fn map_and_table_round_trip() {
        let f = phi(&SigmaShape::new(ThetaObject::point(1), 2, -1).unwrap()).unwrap();
        let j = MapJson::from_map(&f);
        let back = j.to_map().unwrap();
        assert_eq!(back.images, f.images);
        let t = f.target.tabulate(3).unwrap().table;
        let tj = TableJson::from_table(&t);
        assert_eq!(tj.to_table().unwrap(), t);
    }

    #[test]
    fn complexes_and_coefficients() {
        let text = r#"{"format":"complex/v1","vertices":["p"],"edges":[{"name":"e","source":"p","target":"p"}],"faces":["e e"]}"#;
        let Artifact::Complex(cx) = parse_artifact(text).unwrap() else { panic!() };
        assert_eq!(ComplexJson::from_complex(&cx).faces, vec!["e e"]);
        let coeff = r#"{"format":"strict-model/v1","category":{"cyclic":3}}"#;
        let Artifact::Category(c) = parse_artifact(coeff).unwrap() else { panic!() };
        assert_eq!(c.arrow_count(), 3);
        let bad = r#"{"format":"strict-model/v1","category":{"explicit":{"objects":1,"arrows":[[0,0],[0,0]],"identities":[0],"compose":[[0,0,0]]}}}"#;
        assert!(parse_artifact(bad).is_err());
    }
}
