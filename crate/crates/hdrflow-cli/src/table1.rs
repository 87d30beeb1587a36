//! Families of elliptic curves over P^1 with four singular fibers whose
//! parabolic weights sit at a single point. Strings are kept in their LaTeX
//! form; nothing here is parsed or evaluated.

use serde::Serialize;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Table1Row {
    #[serde(rename = "N")]
    pub n: u32,
    pub fiber_combination: &'static str,
    pub fibers: [&'static str; 4],
    pub singular_locus: &'static str,
    pub j_invariant: &'static str,
}

impl Table1Row {
    /// Weights at the weighted point.
    pub fn weights(&self) -> (&'static str, &'static str) {
        match self.n {
            2 => ("1/2", "1/2"),
            3 => ("1/3", "2/3"),
            4 => ("1/4", "3/4"),
            _ => ("1/6", "5/6"),
        }
    }
}

pub const PARAMETERS: &[(&str, &str)] = &[
    ("c_{1, 2}", r"\frac{1}{4}\left(\frac{1 \pm i \sqrt{7}}{2}\right)^{7}"),
    ("c_{3, 4}", r"-\frac{1}{3}(1 \pm i \sqrt{2})^{4}"),
    ("\\omega_{1, 2}", r"-\frac{1}{8}\left(3 \alpha^{2}+6 \alpha-1 \pm \sqrt{\frac{1}{3}(\alpha-1)(3 \alpha+5)^{3}}\right)"),
    ("\\omega_{3, 4}", r"-\frac{1}{3}\left(2\alpha-1\pm2\sqrt{\alpha^2-\alpha-2}\right)"),
    ("\\omega_{5, 6}", r"-\frac{1}{3 \alpha^{2}-2}\left(4\alpha^3-3\alpha \pm \sqrt{2\left(2 \alpha^{2}-1\right)^{3}}\right)"),
    ("\\omega_{7, 8}", r"-\frac{1}{6 \alpha-4}\left(3 \alpha^{2}-1 \pm \sqrt{(3 \alpha+1)(1-\alpha)^{3}}\right)"),
];

pub const TABLE1: [Table1Row; 20] = [
    Table1Row {
        n: 2,
        fiber_combination: "I_1I_1I_1I_3^*",
        fibers: ["I_1", "I_1", "I_1", "I_3^*"],
        singular_locus: r"(\omega_1, \omega_2, \infty, 0)",
        j_invariant: r"-\frac{4}{(\alpha-1)^2} \frac{\left(X^2+2 \alpha X Y+Y^2\right)^3}{X^3 Y\left[12 X^2+3\left(3 \alpha^2+6 \alpha-1\right) X Y+4(\alpha+2) Y^2\right]}, \quad \alpha \neq-2, -\frac{5}{3}, 1",
    },
    Table1Row {
        n: 2,
        fiber_combination: "I_1I_1I_2I_2^*",
        fibers: ["I_1", "I_1", "I_2", "I_2^*"],
        singular_locus: r"(\omega_3, \omega_4, \infty, 0)",
        j_invariant: r"\frac{4}{(2-\alpha)^2} \frac{\left(X^2+\alpha X Y+Y^2\right)^3}{X^2 Y^2\left[3 X^2+2(2 \alpha-1) X Y+3 Y^2\right]}, \quad\alpha\neq -1, 2",
    },
    Table1Row {
        n: 2,
        fiber_combination: "I_0^*I_4I_1I_1",
        fibers: ["I_0^*", "I_4", "I_1", "I_1"],
        singular_locus: r"(\lambda, 1, \infty, 0)",
        j_invariant: r"\frac{1}{108} \frac{\left(X^2+14 X Y+Y^2\right)^3}{X Y(X-Y)^4} \quad \lambda \neq 0, 1, \infty",
    },
    Table1Row {
        n: 2,
        fiber_combination: "I_0^*I_2I_2I_2",
        fibers: ["I_0^*", "I_2", "I_2", "I_2"],
        singular_locus: r"(\lambda, 1, \infty, 0)",
        j_invariant: r"\frac{4}{27} \frac{\left(X^{2}-X Y+Y^{2}\right)^{3}}{X^{2} Y^{2}(X-Y)}, \quad \lambda\neq 0, 1, \infty",
    },
    Table1Row {
        n: 3,
        fiber_combination: "I_1I_1I_2IV^*",
        fibers: ["I_1", "I_1", "I_2", "IV^*"],
        singular_locus: r"(\omega_5, \omega_6, \infty, 0)",
        j_invariant: r"\frac{X(X+2 \alpha Y)^3}{Y^2\left[\left(3 \alpha^2-2\right) X^2+2 \alpha\left(4 \alpha^2-3\right) X Y-Y^2\right]}, \quad \alpha \neq 0, \pm \sqrt{\frac{1}{2}}, \pm \sqrt{\frac{2}{3}}",
    },
    Table1Row {
        n: 3,
        fiber_combination: "I_1I_1I_6IV",
        fibers: ["I_1", "I_1", "I_6", "IV"],
        singular_locus: r"(1, -1, \infty, 0)",
        j_invariant: r"\frac{1}{64}\frac{X^2(9X^2-8Y^2)^3}{Y^6(X^2-Y^2)}",
    },
    Table1Row {
        n: 3,
        fiber_combination: "I_1I_2I_5IV",
        fibers: ["I_1", "I_2", "I_5", "IV"],
        singular_locus: r"\left(-\frac{27}{4}, -\frac{1}{2}, \infty, 0\right)",
        j_invariant: r"-\frac{4}{27} \frac{X^{2}\left(X^{2}+8 X Y+10 Y^{2}\right)^{3}}{Y^{5}(2 X+Y)^{2}(4 X+27 Y)}",
    },
    Table1Row {
        n: 3,
        fiber_combination: "I_3I_3I_2IV",
        fibers: ["I_3", "I_3", "I_2", "IV"],
        singular_locus: r"(\infty, 0, -1, 1)",
        j_invariant: r"-\frac{1}{2^{12}} \frac{(X-Y)^{2}\left(9 X^{2}+14 X Y+9 Y^{2}\right)^{3}}{X^{3} Y^{3}(X+Y)^{2}}",
    },
    Table1Row {
        n: 3,
        fiber_combination: "I_0^*I_3I_1II",
        fibers: ["I_0^*", "I_3", "I_1", "II"],
        singular_locus: r"(\lambda, 0, \infty, 1)",
        j_invariant: r"-\frac{1}{64} \frac{(X-Y)(X-9 Y)^{3}}{X^{3} Y}, \quad \lambda\neq 0, 1, \infty",
    },
    Table1Row {
        n: 4,
        fiber_combination: "I_1I_1I_1III^*",
        fibers: ["I_1", "I_1", "I_1", "III^*"],
        singular_locus: r"(\omega_7, \omega_8, \infty, 0)",
        j_invariant: r"\frac{(X+\alpha Y)^{3}}{Y\left[\left(3 \alpha-2\right) X^{2}-\left(3 \alpha^{2}-1\right) X Y+\alpha^3 Y\right]}, \quad \alpha \neq -\frac{1}{3}, 0, \frac{2}{3}, 1 ",
    },
    Table1Row {
        n: 4,
        fiber_combination: "I_1I_1I_7III",
        fibers: ["I_1", "I_1", "I_7", "III"],
        singular_locus: r"(c_1, c_2, \infty, 0)",
        j_invariant: r"\frac{4}{27} \frac{\left(X^{3}+4 X^{2} Y+10 X Y^{2}+6Y^{3}\right)^{3}}{Y^{7}(4X^2+13XY+32Y^2)}",
    },
    Table1Row {
        n: 4,
        fiber_combination: "I_1I_2I_6III",
        fibers: ["I_1", "I_2", "I_6", "III"],
        singular_locus: r"(4, 1, \infty, 0)",
        j_invariant: r"\frac{4}{27} \frac{\left(X^{3}-6 X^{2} Y+9 X Y^{2}-3 Y^{3}\right)^{3}}{Y^{6}(X-Y)^{2}(X-4 Y)}",
    },
    Table1Row {
        n: 4,
        fiber_combination: "I_1I_3I_5III",
        fibers: ["I_1", "I_3", "I_5", "III"],
        singular_locus: r"(-\frac{25}{3}, 0, \infty, \frac{1}{5})",
        j_invariant: r"-\frac{25}{2^{14} \cdot 3^{3}} \frac{\left(5 X^{3}+45 X^{2} Y+39 X Y^{2}-25 Y^{3}\right)^{3}}{X^{3} Y^{5}(3 X+25 Y)} ",
    },
    Table1Row {
        n: 4,
        fiber_combination: "I_2I_3I_4III",
        fibers: ["I_2", "I_3", "I_4", "III"],
        singular_locus: r"(-\frac{1}{3}, 0, \infty, 1)",
        j_invariant: r"\frac{1}{108} \frac{\left(16 X^{3}-3 X Y^{2}-Y^{3}\right)^{3}}{X^{3} Y^{4}(3 X+Y)^{2}}",
    },
    Table1Row {
        n: 4,
        fiber_combination: " I_0^*I_2I_1III",
        fibers: ["I_0^*", "I_2", "I_1", "III"],
        singular_locus: r"(\lambda, 0, \infty, 1)",
        j_invariant: r"-\frac{1}{27} \frac{(X-4 Y)^{3}}{X^{2} Y}, \quad \lambda\neq 0, 1, \infty",
    },
    Table1Row {
        n: 6,
        fiber_combination: "I_1I_1I_8II",
        fibers: ["I_1", "I_1", "I_8", "II"],
        singular_locus: r"(c_3, c_4, \infty, 0)",
        j_invariant: r"-\frac{4}{27} \frac{X\left(X^{3}-6 X^{2} Y+15 X Y^{2}-12 Y^{3}\right)^{3}}{Y^{8}\left(3 X^{2}-14 X Y+27 Y^{2}\right)}",
    },
    Table1Row {
        n: 6,
        fiber_combination: "I_1I_2I_7II",
        fibers: ["I_1", "I_2", "I_7", "II"],
        singular_locus: r"(-\frac{9}{4}, -\frac{8}{9}, \infty, 0)",
        j_invariant: r"-4 \frac{X\left(9 X^{3}+36 X^{2} Y+42 X Y^{2}+14 Y^{3}\right)^{3}}{Y^{7}(9 X+8 Y)^{2}(4 X+9 Y)}",
    },
    Table1Row {
        n: 6,
        fiber_combination: "I_1I_4I_5II",
        fibers: ["I_1", "I_4", "I_5", "II"],
        singular_locus: r"(-10, 0, \infty, \frac{1}{8})",
        j_invariant: r"-\frac{1}{2^{3} \cdot 3^{12}}\frac{(8X-Y)(8X^3+87X^2Y+96XY^2-63Y^3)^3}{X^4Y^5(X+10Y)}",
    },
    Table1Row {
        n: 6,
        fiber_combination: "I_2I_3I_5II",
        fibers: ["I_2", "I_3", "I_5", "II"],
        singular_locus: r"(-\frac{5}{9}, 0, \infty, 3)",
        j_invariant: r"-\frac{1}{2^{14} \cdot 3} \frac{(X-3 Y)\left(81 X^{3}-9 X^{2} Y-53 X Y^{2}-27 Y^{3}\right)^{3}}{X^{3} Y^{5}(9 X+5 Y)^{2}} ",
    },
    Table1Row {
        n: 6,
        fiber_combination: " I_0^*I_1I_1 IV",
        fibers: ["I_0^*", "I_1", "I_1", "IV"],
        singular_locus: r"(\lambda, 0, \infty, 1)",
        j_invariant: r"-\frac{1}{4} \frac{(X-Y)^{2}}{X Y}, \quad \lambda \neq 0, 1, \infty",
    },
];

pub fn rows(n: Option<u32>) -> Vec<Table1Row> {
    TABLE1.iter().copied().filter(|r| n.is_none_or(|n| r.n == n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape() {
        assert_eq!(TABLE1.len(), 20);
        assert!(TABLE1.iter().all(|r| [2, 3, 4, 6].contains(&r.n)));
        let counts: Vec<usize> = [2, 3, 4, 6].iter().map(|&n| rows(Some(n)).len()).collect();
        assert_eq!(counts, vec![4, 5, 6, 5]);
        for r in TABLE1 {
            let joined: String = r.fibers.concat();
            assert_eq!(joined, r.fiber_combination.replace(' ', ""));
        }
    }
}
