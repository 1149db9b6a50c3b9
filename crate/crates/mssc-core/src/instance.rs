//! Requests, instances, the access/reordering cost model, and instance JSON.

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::{ElementId, Permutation};

/// A requested set of distinct elements. Stored sorted.
#[derive(Clone, PartialEq, Eq)]
pub struct Request {
    elements: Vec<ElementId>,
}

impl Request {
    pub fn new(mut elements: Vec<ElementId>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyRequest);
        }
        elements.sort_unstable();
        if elements.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::BadConfig("request contains duplicate elements".into()));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[ElementId] {
        &self.elements
    }

    pub fn cardinality(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, z: ElementId) -> bool {
        self.elements.binary_search(&z).is_ok()
    }
}

impl std::fmt::Debug for Request {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Request{:?}", self.elements)
    }
}

/// Position of the cheapest requested element on the list.
pub fn access_cost(perm: &Permutation, req: &Request) -> Result<u64> {
    let mut best: Option<usize> = None;
    for &z in req.elements() {
        let pos = perm.position(z)?;
        best = Some(best.map_or(pos, |b| b.min(pos)));
    }
    best.map(|p| p as u64).ok_or(Error::EmptyRequest)
}

/// Access and reordering cost of one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCost {
    pub access: u64,
    pub reorder: u64,
}

impl StepCost {
    pub fn total(&self) -> u64 {
        self.access + self.reorder
    }
}

/// An initial permutation, a request sequence, and the cardinality bound `r`.
#[derive(Clone, PartialEq, Eq)]
pub struct Instance {
    initial: Permutation,
    requests: Vec<Request>,
    r: usize,
}

impl Instance {
    pub fn new(initial: Permutation, requests: Vec<Request>, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::BadConfig("cardinality bound r must be positive".into()));
        }
        let n = initial.n();
        if n == 0 {
            return Err(Error::BadConfig("instance must have at least one element".into()));
        }
        for (t, req) in requests.iter().enumerate() {
            if req.cardinality() > r {
                return Err(Error::InvalidInstance {
                    field: format!("requests[{t}]"),
                    reason: format!("cardinality {} exceeds r = {r}", req.cardinality()),
                });
            }
            for &z in req.elements() {
                if z >= n {
                    return Err(Error::InvalidInstance {
                        field: format!("requests[{t}]"),
                        reason: format!("element {z} out of range, n = {n}"),
                    });
                }
            }
        }
        Ok(Self { initial, requests, r })
    }

    pub fn n(&self) -> usize {
        self.initial.n()
    }

    pub fn m(&self) -> usize {
        self.requests.len()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn initial(&self) -> &Permutation {
        &self.initial
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    /// Parses and validates the instance JSON format:
    /// `{"n": int, "r": int, "initial": [ids by position], "requests": [[ids], ...]}`.
    ///
    /// Syntax and type errors carry serde's line/column; semantic errors name
    /// the offending field.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: RawInstance =
            serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
        raw.validate()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization cannot fail")
    }
}

impl std::fmt::Debug for Instance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Instance")
            .field("n", &self.n())
            .field("r", &self.r)
            .field("m", &self.m())
            .finish()
    }
}

impl Serialize for Instance {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = RawInstance {
            n: self.n(),
            r: self.r,
            initial: self.initial.order().to_vec(),
            requests: self
                .requests
                .iter()
                .map(|r| r.elements().to_vec())
                .collect(),
        };
        raw.serialize(serializer)
    }
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    n: usize,
    r: usize,
    initial: Vec<usize>,
    requests: Vec<Vec<usize>>,
}

impl RawInstance {
    fn validate(self) -> Result<Instance> {
        let invalid = |field: String, reason: String| Error::InvalidInstance { field, reason };
        if self.n == 0 {
            return Err(invalid("n".into(), "must be positive".into()));
        }
        if self.r == 0 {
            return Err(invalid("r".into(), "must be positive".into()));
        }
        if self.initial.len() != self.n {
            return Err(invalid(
                "initial".into(),
                format!("expected {} entries, found {}", self.n, self.initial.len()),
            ));
        }
        let mut seen = vec![false; self.n];
        for (i, &e) in self.initial.iter().enumerate() {
            if e >= self.n {
                return Err(invalid(
                    format!("initial[{i}]"),
                    format!("element {e} out of range, n = {}", self.n),
                ));
            }
            if seen[e] {
                return Err(invalid(format!("initial[{i}]"), format!("duplicate element {e}")));
            }
            seen[e] = true;
        }
        let initial = Permutation::from_order(&self.initial)
            .expect("initial list validated as a bijection");
        let mut requests = Vec::with_capacity(self.requests.len());
        for (t, ids) in self.requests.into_iter().enumerate() {
            if ids.is_empty() {
                return Err(invalid(format!("requests[{t}]"), "empty request".into()));
            }
            if ids.len() > self.r {
                return Err(invalid(
                    format!("requests[{t}]"),
                    format!("cardinality {} exceeds r = {}", ids.len(), self.r),
                ));
            }
            let mut sorted = ids.clone();
            sorted.sort_unstable();
            for (j, &e) in ids.iter().enumerate() {
                if e >= self.n {
                    return Err(invalid(
                        format!("requests[{t}][{j}]"),
                        format!("element {e} out of range, n = {}", self.n),
                    ));
                }
            }
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid(format!("requests[{t}]"), "duplicate element".into()));
            }
            requests.push(Request::new(ids).expect("request validated above"));
        }
        Instance::new(initial, requests, self.r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn access_cost_examples() {
        let ident = Permutation::identity(3);
        assert_eq!(access_cost(&ident, &Request::new(vec![0]).unwrap()).unwrap(), 1);
        assert_eq!(access_cost(&ident, &Request::new(vec![1, 2]).unwrap()).unwrap(), 2);
        // (c,a,b): a at 2, b at 3.
        let p = Permutation::from_order(&[2, 0, 1]).unwrap();
        assert_eq!(access_cost(&p, &Request::new(vec![0, 1]).unwrap()).unwrap(), 2);
    }

    #[test]
    fn access_cost_errors() {
        let ident = Permutation::identity(2);
        assert_eq!(Request::new(vec![]), Err(Error::EmptyRequest));
        let req = Request::new(vec![5]).unwrap();
        assert_eq!(access_cost(&ident, &req), Err(Error::UnknownElement(5)));
    }

    #[test]
    fn instance_json_round_trip() {
        let json = r#"{"n": 3, "r": 2, "initial": [2, 0, 1], "requests": [[0], [1, 2]]}"#;
        let inst = Instance::from_json_str(json).unwrap();
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.m(), 2);
        assert_eq!(inst.initial().order(), &[2, 0, 1]);
        let emitted = inst.to_json_string();
        let back = Instance::from_json_str(&emitted).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn instance_json_field_errors() {
        let dup = r#"{"n": 3, "r": 1, "initial": [0, 0, 1], "requests": []}"#;
        match Instance::from_json_str(dup) {
            Err(Error::InvalidInstance { field, .. }) => assert_eq!(field, "initial[1]"),
            other => panic!("expected InvalidInstance, got {other:?}"),
        }
        let out_of_range = r#"{"n": 2, "r": 1, "initial": [0, 1], "requests": [[2]]}"#;
        match Instance::from_json_str(out_of_range) {
            Err(Error::InvalidInstance { field, .. }) => assert_eq!(field, "requests[0][0]"),
            other => panic!("expected InvalidInstance, got {other:?}"),
        }
        let too_big = r#"{"n": 3, "r": 1, "initial": [0, 1, 2], "requests": [[0, 1]]}"#;
        match Instance::from_json_str(too_big) {
            Err(Error::InvalidInstance { field, .. }) => assert_eq!(field, "requests[0]"),
            other => panic!("expected InvalidInstance, got {other:?}"),
        }
        let syntax = r#"{"n": 3,"#;
        assert!(matches!(Instance::from_json_str(syntax), Err(Error::Json(_))));
    }
}
