//! JSON documents for instances and convex body chasing inputs.
//!
//! Instance layout:
//!
//! ```json
//! {"dim": 1, "T": 2, "x0": [0.0],
//!  "movement": {"kind": "sq_l2_half", "params": {}},
//!  "hitting": {"family": "strongly_convex", "params": {"m": 2.0},
//!              "minimizers": [[1.0], [1.5]]}}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::families::FamilyVariant;
use crate::model::{CostShape, Instance, MovementCost, Point};
use crate::reductions::{CbcInstance, ConvexBody};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MovementDoc {
    pub kind: String,
    #[serde(default)]
    pub params: Map<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingDoc {
    pub family: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    pub minimizers: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub dim: usize,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub x0: Vec<f64>,
    pub movement: MovementDoc,
    pub hitting: HittingDoc,
}

fn tagged<T: for<'de> Deserialize<'de>>(tag: &str, name: &str, params: &Map<String, Value>) -> Result<T> {
    let mut obj = params.clone();
    obj.insert(tag.to_string(), Value::String(name.to_string()));
    serde_json::from_value(Value::Object(obj))
        .map_err(|e| Error::input(format!("bad {tag} \"{name}\": {e}")))
}

fn untagged(tag: &str, value: Value) -> (String, Map<String, Value>) {
    let mut obj = match value {
        Value::Object(o) => o,
        _ => Map::new(),
    };
    let name = obj
        .remove(tag)
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    (name, obj)
}

impl MovementDoc {
    pub fn parse(&self) -> Result<MovementCost> {
        tagged("kind", &self.kind, &self.params)
    }

    pub fn from_movement(m: &MovementCost) -> Self {
        let (kind, params) = untagged("kind", serde_json::to_value(m).unwrap_or(Value::Null));
        MovementDoc { kind, params }
    }
}

impl InstanceDoc {
    pub fn family(&self) -> Result<FamilyVariant> {
        tagged("family", &self.hitting.family, &self.hitting.params)
    }

    /// Validate and build the instance with analytic `lambda`.
    pub fn to_instance(&self) -> Result<Instance> {
        if self.x0.len() != self.dim {
            return Err(Error::input(format!("x0 has {} coordinates, dim is {}", self.x0.len(), self.dim)));
        }
        if self.hitting.minimizers.len() != self.horizon {
            return Err(Error::input(format!(
                "{} minimizers for T = {}",
                self.hitting.minimizers.len(),
                self.horizon
            )));
        }
        let movement = self.movement.parse()?;
        let family = self.family()?;
        let path = self
            .hitting
            .minimizers
            .iter()
            .map(|v| {
                if v.len() != self.dim {
                    return Err(Error::input("minimizer dimension differs from dim"));
                }
                Point::new(v.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        let fragment = family.build(&path)?;
        if fragment.movement != movement {
            return Err(Error::input(format!(
                "family {} pairs with movement {}, document declares {}",
                family.name(),
                fragment.movement.kind_name(),
                movement.kind_name()
            )));
        }
        fragment.into_instance(Point::new(self.x0.clone())?)
    }

    /// Document for an instance whose hitting costs share one family shape.
    pub fn from_instance(instance: &Instance) -> Result<Self> {
        let family = family_of(instance)?;
        let (name, params) = untagged("family", serde_json::to_value(&family)?);
        Ok(InstanceDoc {
            dim: instance.dim(),
            horizon: instance.horizon(),
            x0: instance.start().coords().to_vec(),
            movement: MovementDoc::from_movement(instance.movement()),
            hitting: HittingDoc {
                family: name,
                params,
                minimizers: instance.minimizers().iter().map(|p| p.coords().to_vec()).collect(),
            },
        })
    }
}

fn family_of(instance: &Instance) -> Result<FamilyVariant> {
    let first = instance.cost(1).shape();
    if instance.hitting().iter().any(|f| f.shape() != first) {
        return Err(Error::unsupported("hitting costs do not share one family shape"));
    }
    let fam = match (first, instance.movement()) {
        (CostShape::Polyhedral { alpha, norm }, m) if m.norm_order() == Some(*norm) => FamilyVariant::Polyhedral {
            alpha: *alpha,
            norm: *norm,
        },
        (CostShape::StronglyConvex { m }, MovementCost::SqL2Half) => FamilyVariant::StronglyConvex { m: *m },
        (CostShape::Ripple { m, eps, k }, MovementCost::SqL2Half) => FamilyVariant::Ripple {
            m: *m,
            eps: *eps,
            k: *k,
        },
        (CostShape::Glb { e0, mu }, MovementCost::RectifiedLinear { beta }) => FamilyVariant::Glb {
            e0: e0.clone(),
            beta: beta.clone(),
            mu: mu.clone(),
        },
        _ => return Err(Error::unsupported("instance is not one of the named families")),
    };
    Ok(fam)
}

pub fn parse_instance(json: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(json)?;
    doc.to_instance()
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn instance_to_json(instance: &Instance) -> Result<String> {
    Ok(serde_json::to_string_pretty(&InstanceDoc::from_instance(instance)?)?)
}

/// CBC input: a start point, a norm movement and an ordered body list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CbcDoc {
    pub x0: Vec<f64>,
    pub movement: MovementDoc,
    pub bodies: Vec<ConvexBody>,
}

impl CbcDoc {
    pub fn to_instance(&self) -> Result<CbcInstance> {
        CbcInstance::new(Point::new(self.x0.clone())?, self.bodies.clone(), self.movement.parse()?)
    }

    pub fn from_instance(inst: &CbcInstance) -> Self {
        CbcDoc {
            x0: inst.start().coords().to_vec(),
            movement: MovementDoc::from_movement(inst.movement()),
            bodies: inst.bodies().to_vec(),
        }
    }
}

pub fn parse_cbc(json: &str) -> Result<CbcInstance> {
    let doc: CbcDoc = serde_json::from_str(json)?;
    doc.to_instance()
}

pub fn cbc_to_json(inst: &CbcInstance) -> Result<String> {
    Ok(serde_json::to_string_pretty(&CbcDoc::from_instance(inst))?)
}
