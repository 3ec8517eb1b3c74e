//! Instances of the analysis domains: Gripper, single-city Logistics on a
//! line, the two non-dominance tasks and the small Logistics running
//! example. All actions have unit cost.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::cost::Rational;
use crate::sas_model::{Action, PartialAssignment, State, Task, Value, VarId, VariableDef};

#[cfg(feature = "random")]
pub mod random;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorSpec {
    Gripper(usize),
    LogisticsLine(usize),
    Thm9Pi1,
    Thm9Pi2,
    RunningLogistics,
}

pub fn generate(spec: GeneratorSpec) -> Task {
    match spec {
        GeneratorSpec::Gripper(n) => gripper(n),
        GeneratorSpec::LogisticsLine(n) => logistics_line(n),
        GeneratorSpec::Thm9Pi1 => thm9_pi1(),
        GeneratorSpec::Thm9Pi2 => thm9_pi2(),
        GeneratorSpec::RunningLogistics => running_logistics(),
    }
}

/// Small helper collecting unit-cost actions.
struct Builder {
    variables: Vec<VariableDef>,
    actions: Vec<Action>,
}

impl Builder {
    fn new() -> Self {
        Builder { variables: Vec::new(), actions: Vec::new() }
    }

    fn var(&mut self, name: &str, values: &[String]) -> VarId {
        self.variables.push(VariableDef::new(name, values.to_vec()));
        self.variables.len() - 1
    }

    fn action(&mut self, name: String, pre: &[(VarId, Value)], eff: &[(VarId, Value)]) {
        self.actions.push(Action::new(
            name,
            PartialAssignment::of(pre),
            PartialAssignment::of(eff),
            Rational::from_integer(1),
        ));
    }

    fn finish(self, initial: Vec<Value>, goal: &[(VarId, Value)]) -> Task {
        Task::new(self.variables, State::new(initial), PartialAssignment::of(goal), self.actions, false)
            .expect("generated tasks are valid")
    }
}

fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Gripper with `n` balls: variables robot, right, left, b1..bn.
pub fn gripper(n: usize) -> Task {
    assert!(n >= 1, "gripper needs at least one ball");
    let balls: Vec<String> = (1..=n).map(|i| format!("b{i}")).collect();
    let rooms = ["r1", "r2"];
    let mut arm_values = balls.clone();
    arm_values.push("empty".into());
    let empty = n as Value;
    const ROBOT: Value = 2;

    let mut b = Builder::new();
    let robot = b.var("robot", &strings(&rooms));
    let arms = [b.var("right", &arm_values), b.var("left", &arm_values)];
    let ball_vars: Vec<VarId> = balls.iter().map(|name| b.var(name, &strings(&["r1", "r2", "robot"]))).collect();

    for (r, rn) in rooms.iter().enumerate() {
        for (r2, rn2) in rooms.iter().enumerate() {
            if r != r2 {
                b.action(format!("move {rn} {rn2}"), &[(robot, r as Value)], &[(robot, r2 as Value)]);
            }
        }
    }
    for (i, &ball) in ball_vars.iter().enumerate() {
        for (arm, arm_name) in arms.iter().zip(["right", "left"]) {
            for (r, rn) in rooms.iter().enumerate() {
                let r = r as Value;
                b.action(
                    format!("pickup {} {arm_name} {rn}", balls[i]),
                    &[(ball, r), (*arm, empty), (robot, r)],
                    &[(ball, ROBOT), (*arm, i as Value)],
                );
                b.action(
                    format!("drop {} {arm_name} {rn}", balls[i]),
                    &[(ball, ROBOT), (*arm, i as Value), (robot, r)],
                    &[(ball, r), (*arm, empty)],
                );
            }
        }
    }
    let mut initial = vec![0, empty, empty];
    initial.extend(core::iter::repeat(0).take(n));
    let goal: Vec<(VarId, Value)> = ball_vars.iter().map(|&v| (v, 1)).collect();
    b.finish(initial, &goal)
}

/// One city with locations l0..l2n, two trucks starting at l0 and packages
/// p_i going from l_i to l_{n+i}. Trucks move between any two locations.
pub fn logistics_line(n: usize) -> Task {
    assert!(n >= 1, "logistics-line needs at least one package");
    let locations: Vec<String> = (0..=2 * n).map(|i| format!("l{i}")).collect();
    let trucks = ["t1", "t2"];
    let mut package_values = locations.clone();
    package_values.extend(strings(&trucks));

    let mut b = Builder::new();
    let truck_vars: Vec<VarId> = trucks.iter().map(|t| b.var(t, &locations)).collect();
    let package_vars: Vec<VarId> = (1..=n).map(|i| b.var(&format!("p{i}"), &package_values)).collect();

    for (t, &tv) in truck_vars.iter().enumerate() {
        for l in 0..locations.len() {
            for l2 in 0..locations.len() {
                if l != l2 {
                    b.action(
                        format!("move {} {} {}", trucks[t], locations[l], locations[l2]),
                        &[(tv, l as Value)],
                        &[(tv, l2 as Value)],
                    );
                }
            }
        }
    }
    for (i, &pv) in package_vars.iter().enumerate() {
        for (t, &tv) in truck_vars.iter().enumerate() {
            let in_truck = (locations.len() + t) as Value;
            for (l, ln) in locations.iter().enumerate() {
                let l = l as Value;
                b.action(format!("load p{} {} {ln}", i + 1, trucks[t]), &[(pv, l), (tv, l)], &[(pv, in_truck)]);
                b.action(format!("unload p{} {} {ln}", i + 1, trucks[t]), &[(pv, in_truck), (tv, l)], &[(pv, l)]);
            }
        }
    }
    let mut initial = vec![0, 0];
    initial.extend((1..=n).map(|i| i as Value));
    let goal: Vec<(VarId, Value)> = package_vars.iter().enumerate().map(|(i, &v)| (v, (n + i + 1) as Value)).collect();
    b.finish(initial, &goal)
}

fn thm9_skeleton() -> (Builder, [VarId; 3], [VarId; 3]) {
    let mut b = Builder::new();
    let binary = strings(&["0", "1"]);
    let v = [b.var("v1", &binary), b.var("v2", &binary), b.var("v3", &binary)];
    let u = [b.var("u1", &binary), b.var("u2", &binary), b.var("u3", &binary)];
    (b, v, u)
}

/// First non-dominance task: fork values 6 > 4 3/4 > 4 1/3.
pub fn thm9_pi1() -> Task {
    let (mut b, v, u) = thm9_skeleton();
    b.action("a1".into(), &[(u[0], 0), (u[1], 0), (u[2], 0)], &[(v[0], 1)]);
    b.action("a2".into(), &[(u[0], 1), (u[1], 0), (u[2], 1)], &[(v[1], 1)]);
    b.action("a3".into(), &[(u[0], 1), (u[1], 1), (u[2], 0)], &[(v[2], 1)]);
    for (j, &uj) in u.iter().enumerate() {
        b.action(format!("a{}", 4 + 2 * j), &[(uj, 0)], &[(uj, 1)]);
        b.action(format!("a{}", 5 + 2 * j), &[(uj, 1)], &[(uj, 0)]);
    }
    b.finish(vec![0; 6], &[(v[0], 1), (v[1], 1), (v[2], 1)])
}

/// Second non-dominance task: fork values 3 < 15/4 < 4.
pub fn thm9_pi2() -> Task {
    let (mut b, v, u) = thm9_skeleton();
    for (k, &vk) in v.iter().enumerate() {
        for (j, &uj) in u.iter().enumerate() {
            b.action(format!("a{}", 3 * k + j + 1), &[(uj, 1)], &[(vk, 1)]);
        }
    }
    b.action("a10".into(), &[(u[0], 0)], &[(u[0], 1)]);
    b.finish(vec![0; 6], &[(v[0], 1), (v[1], 1), (v[2], 1)])
}

/// The two-city Logistics example: packages p1 (C to G) and p2 (F to E),
/// city cars c1, c2 (left city, roads A-D, B-D, C-D), c3 (right city,
/// roads E-F, E-G) and truck t on the highway D-E.
/// Name, reachable places and road segments.
type Vehicle<'a> = (&'a str, &'a [&'a str], &'a [(&'a str, &'a str)]);

pub fn running_logistics() -> Task {
    let places = ["A", "B", "C", "D", "E", "F", "G"];
    let vehicles: [Vehicle; 4] = [
        ("c1", &["A", "B", "C", "D"], &[("A", "D"), ("B", "D"), ("C", "D")]),
        ("c2", &["A", "B", "C", "D"], &[("A", "D"), ("B", "D"), ("C", "D")]),
        ("c3", &["E", "F", "G"], &[("E", "F"), ("E", "G")]),
        ("t", &["D", "E"], &[("D", "E")]),
    ];
    let mut package_values = strings(&places);
    package_values.extend(vehicles.iter().map(|v| v.0.to_string()));
    let place = |name: &str| places.iter().position(|&p| p == name).unwrap() as Value;

    let mut b = Builder::new();
    let packages = [b.var("p1", &package_values), b.var("p2", &package_values)];
    let mut vehicle_vars = Vec::new();
    for (name, locs, _) in &vehicles {
        vehicle_vars.push(b.var(name, &strings(locs)));
    }

    for (k, (name, locs, roads)) in vehicles.iter().enumerate() {
        let at = |l: &str| locs.iter().position(|&x| x == l).unwrap() as Value;
        for &(x, y) in roads.iter() {
            for (from, to) in [(x, y), (y, x)] {
                b.action(format!("drive-{name}-from-{from}-to-{to}"), &[(vehicle_vars[k], at(from))], &[(vehicle_vars[k], at(to))]);
            }
        }
    }
    for (pi, &p) in packages.iter().enumerate() {
        for (k, (name, locs, _)) in vehicles.iter().enumerate() {
            let inside = (places.len() + k) as Value;
            for (li, &l) in locs.iter().enumerate() {
                let veh = (vehicle_vars[k], li as Value);
                b.action(format!("load-p{}-into-{name}-at-{l}", pi + 1), &[(p, place(l)), veh], &[(p, inside)]);
                b.action(format!("unload-p{}-from-{name}-at-{l}", pi + 1), &[(p, inside), veh], &[(p, place(l))]);
            }
        }
    }
    // p1:C, p2:F, c1:A, c2:B, c3:G, t:E
    let initial = vec![place("C"), place("F"), 0, 1, 2, 1];
    let goal = [(packages[0], place("G")), (packages[1], place("E")), (vehicle_vars[2], 1)];
    b.finish(initial, &goal)
}
