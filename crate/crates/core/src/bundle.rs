//! Category bundles: JSON files holding a finite category and optional
//! restriction, monic class and named presheaves.
//!
//! Ids are strings in files and integers in memory. Syntax errors carry the
//! line and column from the parser; dangling ids carry the JSON path.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cat::{from_triples, FinCategory, Mor, MorphismData, Obj};
use crate::error::{Error, Result};
use crate::mcat::MCategory;
use crate::presheaf::Presheaf;
use crate::restriction::RestrictionCategory;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismEntry {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresheafEntry {
    /// Section names per object.
    pub sections: BTreeMap<String, Vec<String>>,
    /// For `f : A -> B`, the image in `P(A)` of each section of `P(B)`.
    pub action: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element_bar: Option<BTreeMap<String, Vec<String>>>,
    /// `"par"` when sections and action refer to `Par(C, M)` of the bundle's
    /// category; such entries are resolved on demand.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub over: Option<String>,
}

/// The file format.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleFile {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismEntry>,
    pub identities: BTreeMap<String, String>,
    pub comp: Vec<[String; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restriction: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monics: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub presheaves: BTreeMap<String, PresheafEntry>,
}

/// A presheaf read from a bundle, with element restrictions when given.
#[derive(Debug, Clone)]
pub struct NamedPresheaf {
    pub presheaf: Presheaf,
    pub element_bar: Option<Vec<Vec<Mor>>>,
}

/// A loaded bundle.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub cat: FinCategory,
    pub restriction: Option<Vec<Mor>>,
    pub monics: Option<Vec<Mor>>,
    pub presheaves: BTreeMap<String, NamedPresheaf>,
    /// Entries over `Par(C, M)`, kept unparsed.
    pub par_presheaves: BTreeMap<String, PresheafEntry>,
}

fn bad(msg: String) -> Error {
    Error::Bundle(msg)
}

struct Names {
    objects: HashMap<String, Obj>,
    morphisms: HashMap<String, Mor>,
}

impl Names {
    fn of(c: &FinCategory) -> Self {
        Names {
            objects: c.objects().map(|a| (c.object_name(a).to_string(), a)).collect(),
            morphisms: c.morphisms().map(|m| (c.name(m).to_string(), m)).collect(),
        }
    }

    fn obj(&self, name: &str, path: &str) -> Result<Obj> {
        self.objects.get(name).copied().ok_or_else(|| bad(format!("{path}: unknown object \"{name}\"")))
    }

    fn mor(&self, name: &str, path: &str) -> Result<Mor> {
        self.morphisms.get(name).copied().ok_or_else(|| bad(format!("{path}: unknown morphism \"{name}\"")))
    }
}

impl Bundle {
    pub fn parse(text: &str) -> Result<Self> {
        let file: BundleFile = serde_json::from_str(text)
            .map_err(|e| bad(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        Self::from_file(&file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| match e {
            Error::Bundle(msg) => bad(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_file(file: &BundleFile) -> Result<Self> {
        let mut objects = HashMap::new();
        for (i, o) in file.objects.iter().enumerate() {
            if objects.insert(o.clone(), Obj(i)).is_some() {
                return Err(bad(format!("objects[{i}]: duplicate object \"{o}\"")));
            }
        }
        let mut names = Names { objects, morphisms: HashMap::new() };
        let mut morphisms = Vec::new();
        for (i, m) in file.morphisms.iter().enumerate() {
            let src = names.obj(&m.src, &format!("morphisms[{i}].src"))?;
            let tgt = names.obj(&m.tgt, &format!("morphisms[{i}].tgt"))?;
            if names.morphisms.insert(m.id.clone(), Mor(i)).is_some() {
                return Err(bad(format!("morphisms[{i}].id: duplicate morphism \"{}\"", m.id)));
            }
            morphisms.push(MorphismData::new(m.id.clone(), src, tgt));
        }
        let mut identity = vec![None; file.objects.len()];
        for (o, m) in &file.identities {
            let path = format!("identities.{o}");
            identity[names.obj(o, &path)?.0] = Some(names.mor(m, &path)?);
        }
        let identity = identity
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.ok_or_else(|| bad(format!("identities: object \"{}\" has no identity", file.objects[i]))))
            .collect::<Result<Vec<_>>>()?;
        let triples = file
            .comp
            .iter()
            .enumerate()
            .map(|(i, [g, f, gf])| {
                let path = format!("comp[{i}]");
                Ok((names.mor(g, &path)?, names.mor(f, &path)?, names.mor(gf, &path)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let cat = from_triples(file.objects.clone(), morphisms, identity, &triples)?;
        let restriction = file
            .restriction
            .as_ref()
            .map(|r| {
                let mut bar = vec![None; cat.num_morphisms()];
                for (f, e) in r {
                    let path = format!("restriction.{f}");
                    bar[names.mor(f, &path)?.0] = Some(names.mor(e, &path)?);
                }
                bar.into_iter()
                    .enumerate()
                    .map(|(i, e)| e.ok_or_else(|| bad(format!("restriction: morphism \"{}\" has none", cat.name(Mor(i))))))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        let monics = file
            .monics
            .as_ref()
            .map(|ms| ms.iter().enumerate().map(|(i, m)| names.mor(m, &format!("monics[{i}]"))).collect())
            .transpose()?;
        let mut presheaves = BTreeMap::new();
        let mut par_presheaves = BTreeMap::new();
        for (name, entry) in &file.presheaves {
            match entry.over.as_deref() {
                None => {
                    presheaves.insert(name.clone(), read_presheaf(&cat, &names, name, entry)?);
                }
                Some("par") => {
                    par_presheaves.insert(name.clone(), entry.clone());
                }
                Some(other) => return Err(bad(format!("presheaves.{name}.over: unknown base \"{other}\""))),
            }
        }
        Ok(Bundle { cat, restriction, monics, presheaves, par_presheaves })
    }

    pub fn restriction_category(&self) -> Result<RestrictionCategory> {
        let bar = self.restriction.clone().ok_or_else(|| bad("bundle has no restriction section".into()))?;
        RestrictionCategory::new(self.cat.clone(), bar)
    }

    pub fn m_category(&self) -> Result<MCategory> {
        let monics = self.monics.as_ref().ok_or_else(|| bad("bundle has no monics section".into()))?;
        MCategory::new(self.cat.clone(), monics)
    }

    pub fn from_category(cat: &FinCategory) -> Self {
        Bundle {
            cat: cat.clone(),
            restriction: None,
            monics: None,
            presheaves: BTreeMap::new(),
            par_presheaves: BTreeMap::new(),
        }
    }

    pub fn from_restriction(x: &RestrictionCategory) -> Self {
        let mut b = Self::from_category(x.cat());
        b.restriction = Some(x.bar_table().to_vec());
        b
    }

    pub fn from_m_category(mc: &MCategory) -> Self {
        let mut b = Self::from_category(mc.cat());
        b.monics = Some(mc.monics());
        b
    }

    pub fn with_presheaf(mut self, name: &str, presheaf: Presheaf, element_bar: Option<Vec<Vec<Mor>>>) -> Self {
        self.presheaves.insert(name.to_string(), NamedPresheaf { presheaf, element_bar });
        self
    }

    /// A presheaf stored over `Par(C, M)`, read against `par_cat`.
    pub fn par_presheaf(&self, name: &str, par_cat: &FinCategory) -> Result<NamedPresheaf> {
        let entry = self.par_presheaves.get(name).ok_or_else(|| bad(format!("no presheaf \"{name}\" over par")))?;
        read_presheaf(par_cat, &Names::of(par_cat), name, entry)
    }

    /// Stores a presheaf over `par_cat` in the bundle's file form.
    pub fn with_par_presheaf(mut self, name: &str, par_cat: &FinCategory, np: &NamedPresheaf) -> Self {
        let mut entry = write_presheaf(par_cat, np);
        entry.over = Some("par".into());
        self.par_presheaves.insert(name.to_string(), entry);
        self
    }

    pub fn to_file(&self) -> Result<BundleFile> {
        let c = &self.cat;
        for (i, n) in c.object_names().iter().enumerate() {
            if c.object_names()[..i].contains(n) {
                return Err(bad(format!("object name \"{n}\" is not unique")));
            }
        }
        let mut seen = HashMap::new();
        for m in c.morphisms() {
            if let Some(prev) = seen.insert(c.name(m), m) {
                return Err(bad(format!("morphisms {prev} and {m} share the name \"{}\"", c.name(m))));
            }
        }
        let obj = |a: Obj| c.object_name(a).to_string();
        let mor = |m: Mor| c.name(m).to_string();
        let mut comp = Vec::new();
        for g in c.morphisms() {
            for f in c.into_object(c.src(g)) {
                if !c.is_identity(g) && !c.is_identity(f) {
                    comp.push([mor(g), mor(f), mor(c.comp(g, f))]);
                }
            }
        }
        let mut presheaves: BTreeMap<String, PresheafEntry> = self
            .presheaves
            .iter()
            .map(|(name, np)| (name.clone(), write_presheaf(c, np)))
            .collect();
        for (name, entry) in &self.par_presheaves {
            if presheaves.insert(name.clone(), entry.clone()).is_some() {
                return Err(bad(format!("presheaf name \"{name}\" is used twice")));
            }
        }
        Ok(BundleFile {
            objects: c.object_names().to_vec(),
            morphisms: c
                .morphisms()
                .map(|m| MorphismEntry { id: mor(m), src: obj(c.src(m)), tgt: obj(c.tgt(m)) })
                .collect(),
            identities: c.objects().map(|a| (obj(a), mor(c.id(a)))).collect(),
            comp,
            restriction: self
                .restriction
                .as_ref()
                .map(|bar| c.morphisms().map(|m| (mor(m), mor(bar[m.0]))).collect()),
            monics: self.monics.as_ref().map(|ms| ms.iter().map(|&m| mor(m)).collect()),
            presheaves,
        })
    }

    /// Pretty JSON; identical bundles give identical bytes.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file()?)?)
    }
}

fn section_names(p: &Presheaf, a: Obj) -> Vec<String> {
    let labels: Vec<String> = (0..p.size(a)).map(|x| p.label(a, x)).collect();
    let unique = labels.iter().enumerate().all(|(i, l)| !labels[..i].contains(l));
    if unique {
        labels
    } else {
        (0..p.size(a)).map(|x| x.to_string()).collect()
    }
}

fn write_presheaf(c: &FinCategory, np: &NamedPresheaf) -> PresheafEntry {
    let p = &np.presheaf;
    let names: Vec<Vec<String>> = c.objects().map(|a| section_names(p, a)).collect();
    PresheafEntry {
        sections: c.objects().map(|a| (c.object_name(a).to_string(), names[a.0].clone())).collect(),
        action: c
            .morphisms()
            .map(|f| {
                let row = p.action_table(f).iter().map(|&y| names[c.src(f).0][y].clone()).collect();
                (c.name(f).to_string(), row)
            })
            .collect(),
        element_bar: np.element_bar.as_ref().map(|bar| {
            c.objects()
                .map(|a| (c.object_name(a).to_string(), bar[a.0].iter().map(|&e| c.name(e).to_string()).collect()))
                .collect()
        }),
        over: None,
    }
}

fn read_presheaf(c: &FinCategory, names: &Names, name: &str, entry: &PresheafEntry) -> Result<NamedPresheaf> {
    let base = format!("presheaves.{name}");
    let mut sections: Vec<Option<Vec<String>>> = vec![None; c.num_objects()];
    for (o, secs) in &entry.sections {
        let a = names.obj(o, &format!("{base}.sections"))?;
        for (i, s) in secs.iter().enumerate() {
            if secs[..i].contains(s) {
                return Err(bad(format!("{base}.sections.{o}[{i}]: duplicate section \"{s}\"")));
            }
        }
        sections[a.0] = Some(secs.clone());
    }
    let sections: Vec<Vec<String>> = sections
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| bad(format!("{base}.sections: object \"{}\" missing", c.object_name(Obj(i))))))
        .collect::<Result<_>>()?;
    let index = |a: Obj, s: &str, path: &str| -> Result<usize> {
        sections[a.0].iter().position(|t| t == s).ok_or_else(|| bad(format!("{path}: unknown section \"{s}\"")))
    };
    let mut action = vec![None; c.num_morphisms()];
    for (f, row) in &entry.action {
        let path = format!("{base}.action.{f}");
        let m = names.mor(f, &path)?;
        if row.len() != sections[c.tgt(m).0].len() {
            return Err(bad(format!("{path}: expected {} entries", sections[c.tgt(m).0].len())));
        }
        action[m.0] = Some(
            row.iter()
                .enumerate()
                .map(|(i, s)| index(c.src(m), s, &format!("{path}[{i}]")))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let action = action
        .into_iter()
        .enumerate()
        .map(|(i, row)| match row {
            Some(r) => Ok(r),
            // identities may be left out
            None if c.is_identity(Mor(i)) => Ok((0..sections[c.src(Mor(i)).0].len()).collect()),
            None => Err(bad(format!("{base}.action: morphism \"{}\" missing", c.name(Mor(i))))),
        })
        .collect::<Result<Vec<_>>>()?;
    let presheaf = Presheaf::new(c, sections.iter().map(|s| s.len()).collect(), action)?.with_labels(sections.clone());
    presheaf.check_functorial(c).map_err(|e| bad(format!("{base}: {e}")))?;
    let element_bar = entry
        .element_bar
        .as_ref()
        .map(|eb| {
            let mut bar: Vec<Option<Vec<Mor>>> = vec![None; c.num_objects()];
            for (o, row) in eb {
                let path = format!("{base}.element_bar.{o}");
                let a = names.obj(o, &path)?;
                if row.len() != sections[a.0].len() {
                    return Err(bad(format!("{path}: expected {} entries", sections[a.0].len())));
                }
                bar[a.0] = Some(
                    row.iter()
                        .enumerate()
                        .map(|(i, e)| names.mor(e, &format!("{path}[{i}]")))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            bar.into_iter()
                .enumerate()
                .map(|(i, r)| r.ok_or_else(|| bad(format!("{base}.element_bar: object \"{}\" missing", c.object_name(Obj(i))))))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    Ok(NamedPresheaf { presheaf, element_bar })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{build_finset_mcat, build_finset_p, MonicClass};

    #[test]
    fn restriction_bundle_round_trips() {
        let fp = build_finset_p(2);
        let text = Bundle::from_restriction(&fp.rc).to_json().unwrap();
        let back = Bundle::parse(&text).unwrap();
        assert_eq!(back.restriction_category().unwrap(), fp.rc);
        assert_eq!(Bundle::from_restriction(&back.restriction_category().unwrap()).to_json().unwrap(), text);
    }

    #[test]
    fn presheaf_bundle_round_trips() {
        let fx = build_finset_mcat(2, MonicClass::Inj);
        let y = Presheaf::representable(fx.cat(), Obj(2));
        let b = Bundle::from_m_category(&fx.mc).with_presheaf("y2", y.clone(), None);
        let back = Bundle::parse(&b.to_json().unwrap()).unwrap();
        assert_eq!(back.presheaves["y2"].presheaf, y);
        assert_eq!(back.m_category().unwrap().monics(), fx.mc.monics());
    }

    #[test]
    fn par_presheaves_resolve_against_par() {
        let fx = build_finset_mcat(1, MonicClass::Inj);
        let p = crate::par::par(&fx.mc).unwrap();
        let y = crate::rpsh::RestrictionPresheaf::representable(&p.rc, Obj(1));
        let np = NamedPresheaf { presheaf: y.presheaf.clone(), element_bar: Some(y.bar_table().to_vec()) };
        let b = Bundle::from_m_category(&fx.mc).with_par_presheaf("py1", p.cat(), &np);
        let back = Bundle::parse(&b.to_json().unwrap()).unwrap();
        assert!(back.presheaves.is_empty());
        let read = back.par_presheaf("py1", p.cat()).unwrap();
        assert_eq!(read.presheaf, y.presheaf);
        assert_eq!(read.element_bar.unwrap(), y.bar_table());
    }

    #[test]
    fn syntax_errors_are_positioned() {
        let err = Bundle::parse("{\n  \"objects\": [\"A\",\n}").unwrap_err().to_string();
        assert!(err.starts_with("line 3, column"), "{err}");
    }

    #[test]
    fn dangling_ids_name_their_path() {
        let text = r#"{"objects":["A"],"morphisms":[{"id":"1","src":"A","tgt":"B"}],"identities":{"A":"1"},"comp":[]}"#;
        let err = Bundle::parse(text).unwrap_err().to_string();
        assert_eq!(err, "morphisms[0].tgt: unknown object \"B\"");
        let text = r#"{"objects":["A","B"],"morphisms":[{"id":"1","src":"A","tgt":"A"}],"identities":{"A":"1"},"comp":[]}"#;
        let err = Bundle::parse(text).unwrap_err().to_string();
        assert_eq!(err, "identities: object \"B\" has no identity");
    }
}
