//! `CREATE TABLE` parsing for relational schemas.
//!
//! Only table structure is kept: column names, types, nullability, primary
//! keys and foreign keys. Any other statement is skipped with a warning.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub sql_type: String,
    pub nullable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForeignKey {
    pub column: String,
    pub ref_table: String,
    pub ref_column: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDdl {
    pub name: String,
    pub columns: Vec<Column>,
    pub primary_key: Vec<String>,
    pub foreign_keys: Vec<ForeignKey>,
}

impl TableDdl {
    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns
            .iter()
            .find(|c| c.name.eq_ignore_ascii_case(name))
    }

    /// Normalized `CREATE TABLE` statement, used verbatim in prompts.
    pub fn to_sql(&self) -> String {
        let mut lines: Vec<String> = self
            .columns
            .iter()
            .map(|c| {
                let mut line = format!("  {} {}", c.name, c.sql_type);
                if !c.nullable {
                    line.push_str(" NOT NULL");
                }
                line
            })
            .collect();
        if !self.primary_key.is_empty() {
            lines.push(format!("  PRIMARY KEY ({})", self.primary_key.join(", ")));
        }
        for fk in &self.foreign_keys {
            lines.push(format!(
                "  FOREIGN KEY ({}) REFERENCES {} ({})",
                fk.column, fk.ref_table, fk.ref_column
            ));
        }
        format!("CREATE TABLE {} (\n{}\n);", self.name, lines.join(",\n"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdlWarning {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schema {
    pub tables: Vec<TableDdl>,
    pub warnings: Vec<DdlWarning>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DdlError {
    #[error("line {line}: unterminated {what}")]
    Unterminated { line: usize, what: &'static str },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Quoted(String),
    Str,
    Num(String),
    Punct(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
}

impl Token {
    fn is_kw(&self, kw: &str) -> bool {
        matches!(&self.tok, Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    fn is_punct(&self, c: char) -> bool {
        self.tok == Tok::Punct(c)
    }
}

fn tokenize(sql: &str) -> Result<Vec<Token>, DdlError> {
    let chars: Vec<char> = sql.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            '-' if chars.get(i + 1) == Some(&'-') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '/' if chars.get(i + 1) == Some(&'*') => {
                let start = line;
                i += 2;
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(DdlError::Unterminated {
                                line: start,
                                what: "block comment",
                            })
                        }
                        Some('*') if chars.get(i + 1) == Some(&'/') => {
                            i += 2;
                            break;
                        }
                        Some('\n') => line += 1,
                        _ => {}
                    }
                    i += 1;
                }
            }
            '\'' => {
                let start = line;
                i += 1;
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(DdlError::Unterminated {
                                line: start,
                                what: "string literal",
                            })
                        }
                        Some('\'') if chars.get(i + 1) == Some(&'\'') => i += 2,
                        Some('\'') => {
                            i += 1;
                            break;
                        }
                        Some(ch) => {
                            if *ch == '\n' {
                                line += 1;
                            }
                            i += 1;
                        }
                    }
                }
                tokens.push(Token {
                    tok: Tok::Str,
                    line: start,
                });
            }
            '"' | '`' | '[' => {
                let close = if c == '[' { ']' } else { c };
                let start = line;
                let mut name = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(DdlError::Unterminated {
                                line: start,
                                what: "quoted identifier",
                            })
                        }
                        Some(&ch) if ch == close => {
                            i += 1;
                            break;
                        }
                        Some(&ch) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            name.push(ch);
                            i += 1;
                        }
                    }
                }
                tokens.push(Token {
                    tok: Tok::Quoted(name),
                    line: start,
                });
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&ch) = chars.get(i) {
                    if ch.is_alphanumeric() || ch == '_' || ch == '$' {
                        word.push(ch);
                        i += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(Token {
                    tok: Tok::Word(word),
                    line,
                });
            }
            c if c.is_ascii_digit() => {
                let mut num = String::new();
                while let Some(&ch) = chars.get(i) {
                    if ch.is_ascii_alphanumeric() || ch == '.' {
                        num.push(ch);
                        i += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(Token {
                    tok: Tok::Num(num),
                    line,
                });
            }
            c => {
                tokens.push(Token {
                    tok: Tok::Punct(c),
                    line,
                });
                i += 1;
            }
        }
    }
    Ok(tokens)
}

fn split_statements(tokens: Vec<Token>) -> Result<Vec<Vec<Token>>, DdlError> {
    let mut statements = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    let mut depth = 0usize;
    let mut open_line = 0;
    for t in tokens {
        match t.tok {
            Tok::Punct('(') => {
                if depth == 0 {
                    open_line = t.line;
                }
                depth += 1;
            }
            Tok::Punct(')') => {
                if depth == 0 {
                    return Err(DdlError::Syntax {
                        line: t.line,
                        message: "unbalanced `)`".into(),
                    });
                }
                depth -= 1;
            }
            Tok::Punct(';') if depth == 0 => {
                if !current.is_empty() {
                    statements.push(core::mem::take(&mut current));
                }
                continue;
            }
            _ => {}
        }
        current.push(t);
    }
    if depth > 0 {
        return Err(DdlError::Unterminated {
            line: open_line,
            what: "statement (missing `)`)",
        });
    }
    if !current.is_empty() {
        statements.push(current);
    }
    Ok(statements)
}

/// Splits a token slice on top-level commas.
fn split_items(tokens: &[Token]) -> Vec<&[Token]> {
    let mut items = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, t) in tokens.iter().enumerate() {
        match t.tok {
            Tok::Punct('(') => depth += 1,
            Tok::Punct(')') => depth = depth.saturating_sub(1),
            Tok::Punct(',') if depth == 0 => {
                items.push(&tokens[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    items.push(&tokens[start..]);
    items.retain(|item| !item.is_empty());
    items
}

fn ident(t: &Token) -> Option<String> {
    match &t.tok {
        Tok::Word(w) | Tok::Quoted(w) => Some(w.clone()),
        _ => None,
    }
}

/// Reads a possibly schema-qualified name and returns its last part.
fn qualified_name(tokens: &[Token], pos: &mut usize) -> Option<String> {
    let mut name = ident(tokens.get(*pos)?)?;
    *pos += 1;
    while tokens.get(*pos).is_some_and(|t| t.is_punct('.')) {
        name = ident(tokens.get(*pos + 1)?)?;
        *pos += 2;
    }
    Some(name)
}

/// Reads `( a, b, ... )` starting at `pos`.
fn name_list(tokens: &[Token], pos: &mut usize) -> Option<Vec<String>> {
    if !tokens.get(*pos)?.is_punct('(') {
        return None;
    }
    let mut names = Vec::new();
    *pos += 1;
    loop {
        let t = tokens.get(*pos)?;
        *pos += 1;
        if t.is_punct(')') {
            return Some(names);
        }
        if t.is_punct(',') {
            continue;
        }
        names.push(ident(t)?);
    }
}

const COLUMN_CONSTRAINTS: [&str; 14] = [
    "NOT",
    "NULL",
    "PRIMARY",
    "REFERENCES",
    "DEFAULT",
    "UNIQUE",
    "CHECK",
    "CONSTRAINT",
    "COLLATE",
    "GENERATED",
    "AUTO_INCREMENT",
    "AUTOINCREMENT",
    "COMMENT",
    "IDENTITY",
];

fn render_type(tokens: &[Token]) -> String {
    let mut out = String::new();
    let mut prev_word = false;
    for t in tokens {
        match &t.tok {
            Tok::Word(w) | Tok::Num(w) => {
                if prev_word {
                    out.push(' ');
                }
                out.push_str(w);
                prev_word = true;
            }
            Tok::Quoted(w) => {
                if prev_word {
                    out.push(' ');
                }
                out.push('"');
                out.push_str(w);
                out.push('"');
                prev_word = true;
            }
            Tok::Str => {
                out.push_str("'...'");
                prev_word = true;
            }
            Tok::Punct(c) => {
                out.push(*c);
                prev_word = false;
            }
        }
    }
    out
}

struct PendingFk {
    column: String,
    ref_table: String,
    ref_column: Option<String>,
    line: usize,
}

struct TableBuilder {
    table: TableDdl,
    fks: Vec<PendingFk>,
}

pub fn parse_ddl(sql: &str) -> Result<Schema, DdlError> {
    let statements = split_statements(tokenize(sql)?)?;
    let mut schema = Schema::default();
    let mut builders: Vec<TableBuilder> = Vec::new();
    for stmt in &statements {
        let line = stmt[0].line;
        match parse_create_table(stmt, &mut schema.warnings)? {
            Some(b) => {
                if builders.iter().any(|o| o.table.name == b.table.name) {
                    schema.warnings.push(DdlWarning {
                        line,
                        message: format!(
                            "table `{}` declared twice; keeping the first",
                            b.table.name
                        ),
                    });
                } else {
                    builders.push(b);
                }
            }
            None => {
                let head: Vec<String> = stmt.iter().take(2).filter_map(ident).collect();
                schema.warnings.push(DdlWarning {
                    line,
                    message: format!("skipped statement `{}`", head.join(" ")),
                });
            }
        }
    }
    // Resolve foreign keys once every table is known.
    let known: Vec<(String, Vec<String>, Vec<String>)> = builders
        .iter()
        .map(|b| {
            (
                b.table.name.clone(),
                b.table.columns.iter().map(|c| c.name.clone()).collect(),
                b.table.primary_key.clone(),
            )
        })
        .collect();
    for b in builders {
        let TableBuilder { mut table, fks } = b;
        for fk in fks {
            if table.column(&fk.column).is_none() {
                schema.warnings.push(DdlWarning {
                    line: fk.line,
                    message: format!(
                        "foreign key on undeclared column `{}` of `{}` dropped",
                        fk.column, table.name
                    ),
                });
                continue;
            }
            let target = known
                .iter()
                .find(|(n, _, _)| n.eq_ignore_ascii_case(&fk.ref_table));
            let ref_column = match (fk.ref_column, target) {
                (Some(c), Some((_, cols, _))) => {
                    if !cols.iter().any(|k| k.eq_ignore_ascii_case(&c)) {
                        schema.warnings.push(DdlWarning {
                            line: fk.line,
                            message: format!(
                                "foreign key references undeclared column `{}.{}`",
                                fk.ref_table, c
                            ),
                        });
                    }
                    c
                }
                (Some(c), None) => c,
                (None, Some((_, _, pk))) if pk.len() == 1 => pk[0].clone(),
                (None, _) => {
                    schema.warnings.push(DdlWarning {
                        line: fk.line,
                        message: format!(
                            "foreign key to `{}` names no column; assuming `{}`",
                            fk.ref_table, fk.column
                        ),
                    });
                    fk.column.clone()
                }
            };
            table.foreign_keys.push(ForeignKey {
                column: fk.column,
                ref_table: fk.ref_table,
                ref_column,
            });
        }
        schema.tables.push(table);
    }
    Ok(schema)
}

fn parse_create_table(
    stmt: &[Token],
    warnings: &mut Vec<DdlWarning>,
) -> Result<Option<TableBuilder>, DdlError> {
    let line = stmt[0].line;
    if !stmt[0].is_kw("CREATE") {
        return Ok(None);
    }
    let mut pos = 1;
    while stmt.get(pos).is_some_and(|t| {
        [
            "OR",
            "REPLACE",
            "TEMP",
            "TEMPORARY",
            "GLOBAL",
            "LOCAL",
            "UNLOGGED",
        ]
        .iter()
        .any(|k| t.is_kw(k))
    }) {
        pos += 1;
    }
    if !stmt.get(pos).is_some_and(|t| t.is_kw("TABLE")) {
        return Ok(None);
    }
    pos += 1;
    if stmt.get(pos).is_some_and(|t| t.is_kw("IF")) {
        pos += 3;
    }
    let syntax = |message: &str| DdlError::Syntax {
        line,
        message: message.to_string(),
    };
    let name = qualified_name(stmt, &mut pos).ok_or_else(|| syntax("expected table name"))?;
    if !stmt.get(pos).is_some_and(|t| t.is_punct('(')) {
        // CREATE TABLE ... AS SELECT and similar.
        return Ok(None);
    }
    let mut depth = 0usize;
    let mut close = None;
    for (i, t) in stmt.iter().enumerate().skip(pos) {
        if t.is_punct('(') {
            depth += 1;
        } else if t.is_punct(')') {
            depth -= 1;
            if depth == 0 {
                close = Some(i);
                break;
            }
        }
    }
    let close = close.ok_or(DdlError::Unterminated {
        line,
        what: "column list",
    })?;
    let mut builder = TableBuilder {
        table: TableDdl {
            name,
            columns: Vec::new(),
            primary_key: Vec::new(),
            foreign_keys: Vec::new(),
        },
        fks: Vec::new(),
    };
    for item in split_items(&stmt[pos + 1..close]) {
        parse_item(item, &mut builder, warnings)?;
    }
    let mut pk = Vec::new();
    for col in core::mem::take(&mut builder.table.primary_key) {
        match builder.table.column(&col) {
            Some(c) => {
                let c = c.name.clone();
                if !pk.contains(&c) {
                    pk.push(c);
                }
            }
            None => warnings.push(DdlWarning {
                line,
                message: format!(
                    "primary key on undeclared column `{col}` of `{}` dropped",
                    builder.table.name
                ),
            }),
        }
    }
    for c in builder.table.columns.iter_mut() {
        if pk.contains(&c.name) {
            c.nullable = false;
        }
    }
    builder.table.primary_key = pk;
    Ok(Some(builder))
}

fn parse_item(
    item: &[Token],
    b: &mut TableBuilder,
    warnings: &mut Vec<DdlWarning>,
) -> Result<(), DdlError> {
    let line = item[0].line;
    let mut pos = 0;
    if item[0].is_kw("CONSTRAINT") {
        pos = 2;
    }
    let Some(head) = item.get(pos) else {
        return Err(DdlError::Syntax {
            line,
            message: "empty constraint".into(),
        });
    };
    if head.is_kw("PRIMARY") && item.get(pos + 1).is_some_and(|t| t.is_kw("KEY")) {
        pos += 2;
        let cols = name_list(item, &mut pos).ok_or_else(|| DdlError::Syntax {
            line,
            message: "expected column list after PRIMARY KEY".into(),
        })?;
        b.table.primary_key.extend(cols);
        return Ok(());
    }
    if head.is_kw("FOREIGN") && item.get(pos + 1).is_some_and(|t| t.is_kw("KEY")) {
        pos += 2;
        let local = name_list(item, &mut pos).ok_or_else(|| DdlError::Syntax {
            line,
            message: "expected column list after FOREIGN KEY".into(),
        })?;
        if !item.get(pos).is_some_and(|t| t.is_kw("REFERENCES")) {
            return Err(DdlError::Syntax {
                line,
                message: "expected REFERENCES".into(),
            });
        }
        pos += 1;
        let (ref_table, ref_cols) = references(item, &mut pos, line)?;
        if ref_cols.as_ref().is_some_and(|r| r.len() != local.len()) {
            warnings.push(DdlWarning {
                line,
                message: "foreign key column counts differ; extra columns ignored".into(),
            });
        }
        for (i, column) in local.into_iter().enumerate() {
            let ref_column = match &ref_cols {
                Some(r) => match r.get(i) {
                    Some(c) => Some(c.clone()),
                    None => continue,
                },
                None => None,
            };
            b.fks.push(PendingFk {
                column,
                ref_table: ref_table.clone(),
                ref_column,
                line,
            });
        }
        return Ok(());
    }
    if [
        "UNIQUE", "CHECK", "INDEX", "KEY", "EXCLUDE", "FULLTEXT", "SPATIAL",
    ]
    .iter()
    .any(|k| head.is_kw(k))
        || pos > 0
    {
        return Ok(());
    }
    // Column definition.
    let name = ident(head).ok_or_else(|| DdlError::Syntax {
        line,
        message: "expected column name".into(),
    })?;
    pos += 1;
    let type_start = pos;
    let mut depth = 0usize;
    while let Some(t) = item.get(pos) {
        if t.is_punct('(') {
            depth += 1;
        } else if t.is_punct(')') {
            depth = depth.saturating_sub(1);
        } else if depth == 0 && COLUMN_CONSTRAINTS.iter().any(|k| t.is_kw(k)) {
            break;
        }
        pos += 1;
    }
    let sql_type = render_type(&item[type_start..pos]);
    let mut nullable = true;
    depth = 0;
    while let Some(t) = item.get(pos) {
        if t.is_punct('(') {
            depth += 1;
        } else if t.is_punct(')') {
            depth = depth.saturating_sub(1);
        } else if depth == 0 {
            if t.is_kw("NOT") && item.get(pos + 1).is_some_and(|n| n.is_kw("NULL")) {
                nullable = false;
                pos += 1;
            } else if t.is_kw("PRIMARY") && item.get(pos + 1).is_some_and(|n| n.is_kw("KEY")) {
                b.table.primary_key.push(name.clone());
                pos += 1;
            } else if t.is_kw("REFERENCES") {
                pos += 1;
                let (ref_table, ref_cols) = references(item, &mut pos, line)?;
                b.fks.push(PendingFk {
                    column: name.clone(),
                    ref_table,
                    ref_column: ref_cols.and_then(|c| c.into_iter().next()),
                    line,
                });
                continue;
            }
        }
        pos += 1;
    }
    b.table.columns.push(Column {
        name,
        sql_type,
        nullable,
    });
    Ok(())
}

fn references(
    item: &[Token],
    pos: &mut usize,
    line: usize,
) -> Result<(String, Option<Vec<String>>), DdlError> {
    let table = qualified_name(item, pos).ok_or_else(|| DdlError::Syntax {
        line,
        message: "expected table after REFERENCES".into(),
    })?;
    let cols = if item.get(*pos).is_some_and(|t| t.is_punct('(')) {
        Some(name_list(item, pos).ok_or_else(|| DdlError::Syntax {
            line,
            message: "malformed REFERENCES column list".into(),
        })?)
    } else {
        None
    };
    Ok((table, cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn minimal_statement() {
        let s = parse_ddl("CREATE TABLE t (id INT PRIMARY KEY);").unwrap();
        assert_eq!(s.tables.len(), 1);
        let t = &s.tables[0];
        assert_eq!(t.name, "t");
        assert_eq!(
            t.columns,
            vec![Column {
                name: "id".into(),
                sql_type: "INT".into(),
                nullable: false
            }]
        );
        assert_eq!(t.primary_key, vec!["id"]);
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn empty_input() {
        assert_eq!(parse_ddl("").unwrap(), Schema::default());
        assert_eq!(
            parse_ddl("  -- nothing\n/* here */").unwrap(),
            Schema::default()
        );
    }

    #[test]
    fn two_tables_with_foreign_key() {
        let sql = r#"
            CREATE TABLE funders (
                id SERIAL,
                name VARCHAR(255) NOT NULL,
                CONSTRAINT funders_pk PRIMARY KEY (id)
            );
            -- grants reference their funder
            CREATE TABLE IF NOT EXISTS public."grants" (
                id INTEGER PRIMARY KEY,
                funder INTEGER NOT NULL,
                amount NUMERIC(12, 2) DEFAULT 0,
                FOREIGN KEY (funder) REFERENCES funders (id)
            );
        "#;
        let s = parse_ddl(sql).unwrap();
        assert!(s.warnings.is_empty(), "{:?}", s.warnings);
        assert_eq!(s.tables.len(), 2);
        let grants = &s.tables[1];
        assert_eq!(grants.name, "grants");
        assert_eq!(
            grants.foreign_keys,
            vec![ForeignKey {
                column: "funder".into(),
                ref_table: "funders".into(),
                ref_column: "id".into()
            }]
        );
        assert_eq!(grants.column("amount").unwrap().sql_type, "NUMERIC(12,2)");
        assert!(grants.column("amount").unwrap().nullable);
        assert_eq!(s.tables[0].primary_key, vec!["id"]);
        assert!(!s.tables[0].column("id").unwrap().nullable);
    }

    #[test]
    fn inline_references_and_defaulted_ref_column() {
        let sql = "CREATE TABLE a (id INT PRIMARY KEY);\nCREATE TABLE b (x INT REFERENCES a, y INT REFERENCES a(id));";
        let s = parse_ddl(sql).unwrap();
        let b = &s.tables[1];
        assert_eq!(b.foreign_keys.len(), 2);
        assert!(b
            .foreign_keys
            .iter()
            .all(|fk| fk.ref_table == "a" && fk.ref_column == "id"));
    }

    #[test]
    fn other_statements_are_skipped_with_warning() {
        let sql =
            "CREATE INDEX i ON t (x);\nINSERT INTO t VALUES (1, 'a;b');\nCREATE TABLE t (x INT);";
        let s = parse_ddl(sql).unwrap();
        assert_eq!(s.tables.len(), 1);
        assert_eq!(s.warnings.len(), 2);
        assert_eq!(s.warnings[1].line, 2);
    }

    #[test]
    fn undeclared_fk_column_warns() {
        let sql = "CREATE TABLE a (id INT PRIMARY KEY);\nCREATE TABLE b (x INT, FOREIGN KEY (x) REFERENCES a (nope), FOREIGN KEY (zz) REFERENCES a (id));";
        let s = parse_ddl(sql).unwrap();
        let b = &s.tables[1];
        assert_eq!(b.foreign_keys.len(), 1);
        assert_eq!(b.foreign_keys[0].ref_column, "nope");
        assert_eq!(s.warnings.len(), 2);
        // External tables are fine.
        let s = parse_ddl("CREATE TABLE b (x INT REFERENCES ext(id));").unwrap();
        assert!(s.warnings.is_empty());
        assert_eq!(s.tables[0].foreign_keys[0].ref_table, "ext");
    }

    #[test]
    fn unterminated_statements() {
        assert!(matches!(
            parse_ddl("CREATE TABLE t (id INT"),
            Err(DdlError::Unterminated { line: 1, .. })
        ));
        assert!(matches!(
            parse_ddl("CREATE TABLE t (\n name TEXT DEFAULT 'x);"),
            Err(DdlError::Unterminated { line: 2, .. })
        ));
        assert!(matches!(
            parse_ddl("/* open"),
            Err(DdlError::Unterminated { .. })
        ));
    }

    #[test]
    fn to_sql_is_normalized() {
        let s = parse_ddl(
            "create table t (id int primary key, ref_id int references u(id), note text)",
        )
        .unwrap();
        assert_eq!(
            s.tables[0].to_sql(),
            "CREATE TABLE t (\n  id int NOT NULL,\n  ref_id int,\n  note text,\n  PRIMARY KEY (id),\n  FOREIGN KEY (ref_id) REFERENCES u (id)\n);"
        );
    }
}
