//! Rendering of result tables as markdown, CSV or JSON.
//!
//! Markdown and CSV numbers print with 6 significant digits unless
//! full precision is requested; JSON always carries full-precision
//! doubles.

use serde_json::json;

/// Output format of a rendered table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TableFormat {
    Md,
    Csv,
    Json,
}

/// Number formatting policy for the human-readable formats.
#[derive(Debug, Clone, Copy)]
pub struct NumberFormat {
    pub full_precision: bool,
}

impl NumberFormat {
    pub fn fmt(&self, x: f64) -> String {
        if self.full_precision {
            format!("{x}")
        } else {
            fmt_significant(x, 6)
        }
    }
}

/// Formats with a fixed number of significant digits, switching to
/// scientific notation away from human scale.
pub fn fmt_significant(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if magnitude < -4 || magnitude >= sig as i32 {
        format!("{:.*e}", sig - 1, x)
    } else {
        let decimals = (sig as i32 - 1 - magnitude).max(0) as usize;
        format!("{:.*}", decimals, x)
    }
}

/// One table cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

/// A rectangular table with named columns, renderable in every output
/// format.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Free-form footnotes, printed under markdown tables only.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: TableFormat, numbers: NumberFormat) -> String {
        match format {
            TableFormat::Md => self.render_md(numbers),
            TableFormat::Csv => self.render_csv(numbers),
            TableFormat::Json => self.render_json(),
        }
    }

    fn cell_text(cell: &Cell, numbers: NumberFormat) -> String {
        match cell {
            Cell::Num(x) => numbers.fmt(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn render_md(&self, numbers: NumberFormat) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let s = Self::cell_text(c, numbers);
                        widths[j] = widths[j].max(s.len());
                        s
                    })
                    .collect()
            })
            .collect();

        let mut out = String::new();
        let line = |cells: &[String]| {
            let row = cells
                .iter()
                .enumerate()
                .map(|(j, s)| format!("{:<w$}", s, w = widths[j]))
                .collect::<Vec<_>>()
                .join(" | ");
            format!("| {row} |\n")
        };
        out.push_str(&line(
            &self.columns.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        ));
        let sep: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&format!(
            "|{}|\n",
            sep.iter()
                .map(|s| format!(" {s} "))
                .collect::<Vec<_>>()
                .join("|")
        ));
        for row in &rows {
            out.push_str(&line(row));
        }
        for note in &self.notes {
            out.push_str(&format!("\n{note}\n"));
        }
        out
    }

    fn render_csv(&self, numbers: NumberFormat) -> String {
        let quote = |s: &str| {
            if s.contains(',') || s.contains('"') || s.contains('\n') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        };
        let mut out = String::new();
        out.push_str(
            &self
                .columns
                .iter()
                .map(|c| quote(c))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
        for row in &self.rows {
            out.push_str(
                &row.iter()
                    .map(|c| quote(&Self::cell_text(c, numbers)))
                    .collect::<Vec<_>>()
                    .join(","),
            );
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    let value = match cell {
                        Cell::Num(x) if x.is_finite() => json!(x),
                        Cell::Num(x) => json!(x.to_string()),
                        Cell::Int(i) => json!(i),
                        Cell::Text(s) => json!(s),
                        Cell::Bool(b) => json!(b),
                        Cell::Empty => serde_json::Value::Null,
                    };
                    obj.insert(col.to_string(), value);
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&rows).expect("table serializes");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_significant(11627.0535816049, 6), "11627.1");
        assert_eq!(fmt_significant(3927.1173051829, 6), "3927.12");
        assert_eq!(fmt_significant(0.5, 6), "0.500000");
        assert_eq!(fmt_significant(-0.066286, 6), "-0.0662860");
        assert_eq!(fmt_significant(2.0831534e-7, 6), "2.08315e-7");
        assert_eq!(fmt_significant(0.0, 6), "0");
        assert_eq!(fmt_significant(5.303381571811839e8, 6), "5.30338e8");
    }

    #[test]
    fn csv_quotes_commas() {
        let mut t = Table::new(vec!["estimator", "mse"]);
        t.push(vec![
            Cell::Text("t:m=-1,w=1,c=2,d=1,opt".into()),
            Cell::Num(1.5),
        ]);
        let csv = t.render(
            TableFormat::Csv,
            NumberFormat {
                full_precision: false,
            },
        );
        assert_eq!(csv, "estimator,mse\n\"t:m=-1,w=1,c=2,d=1,opt\",1.50000\n");
    }

    #[test]
    fn md_has_header_separator() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![Cell::Int(1), Cell::Bool(false)]);
        let md = t.render(
            TableFormat::Md,
            NumberFormat {
                full_precision: false,
            },
        );
        let lines: Vec<&str> = md.lines().collect();
        assert!(lines[0].starts_with("| a"));
        assert!(lines[1].contains("---"));
        assert!(lines[2].contains("false"));
    }

    #[test]
    fn json_rows_are_objects() {
        let mut t = Table::new(vec!["x", "note"]);
        t.push(vec![Cell::Num(0.25), Cell::Empty]);
        let parsed: serde_json::Value = serde_json::from_str(
            &t.render(
                TableFormat::Json,
                NumberFormat {
                    full_precision: true,
                },
            ),
        )
        .unwrap();
        assert_eq!(parsed[0]["x"], json!(0.25));
        assert_eq!(parsed[0]["note"], serde_json::Value::Null);
    }
}
