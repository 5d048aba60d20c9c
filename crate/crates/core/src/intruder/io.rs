//! CSV task, key and response files. Positions in files are 1-based.

use std::collections::BTreeMap;
use std::path::Path;

use super::{IntruderTask, ResponseSet, TaskKind};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

const CONTEXT_SEP: &str = "; ";

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))
}

/// Annotator-facing file: `task_id,kind,context,item_1..item_k`. Tasks with
/// fewer items than the widest one leave trailing cells empty.
pub fn save_tasks(tasks: &[IntruderTask], path: &Path) -> Result<()> {
    let width = tasks.iter().map(IntruderTask::n_items).max().unwrap_or(0);
    write_atomic(path, |w| {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec![
            "task_id".to_owned(),
            "kind".to_owned(),
            "context".to_owned(),
        ];
        header.extend((1..=width).map(|i| format!("item_{i}")));
        out.write_record(&header)?;
        for t in tasks {
            let mut row = vec![
                t.task_id.clone(),
                t.kind.as_str().to_owned(),
                t.context.join(CONTEXT_SEP),
            ];
            row.extend(t.display_items.iter().cloned());
            row.resize(3 + width, String::new());
            out.write_record(&row)?;
        }
        out.flush()
    })
}

/// `task_id,answer_index`.
pub fn save_key(tasks: &[IntruderTask], path: &Path) -> Result<()> {
    write_atomic(path, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["task_id", "answer_index"])?;
        for t in tasks {
            out.write_record([t.task_id.as_str(), &(t.answer_index + 1).to_string()])?;
        }
        out.flush()
    })
}

/// `task_id,annotator_id,choice_index`.
pub fn save_responses(responses: &ResponseSet, path: &Path) -> Result<()> {
    write_atomic(path, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["task_id", "annotator_id", "choice_index"])?;
        for (task, rs) in responses.tasks() {
            for (annotator, choice) in rs {
                out.write_record([task, annotator.as_str(), &(choice + 1).to_string()])?;
            }
        }
        out.flush()
    })
}

fn parse_position(path: &Path, line: usize, field: &str) -> Result<usize> {
    match field.trim().parse::<usize>() {
        Ok(p) if p >= 1 => Ok(p - 1),
        _ => Err(Error::parse(
            path,
            line,
            format!("expected a 1-based position, found {field:?}"),
        )),
    }
}

/// Reads a task file and its keyfile back into tasks.
pub fn load_tasks(tasks_path: &Path, key_path: &Path) -> Result<Vec<IntruderTask>> {
    let mut answers = BTreeMap::new();
    for (i, row) in reader(key_path)?.records().enumerate() {
        let row = row.map_err(|e| Error::csv(key_path, e))?;
        let line = i + 2;
        if row.len() != 2 {
            return Err(Error::parse(
                key_path,
                line,
                "expected task_id,answer_index",
            ));
        }
        if answers
            .insert(
                row[0].to_owned(),
                (parse_position(key_path, line, &row[1])?, false),
            )
            .is_some()
        {
            return Err(Error::parse(
                key_path,
                line,
                format!("duplicate task {:?}", &row[0]),
            ));
        }
    }
    let mut tasks = Vec::new();
    for (i, row) in reader(tasks_path)?.records().enumerate() {
        let row = row.map_err(|e| Error::csv(tasks_path, e))?;
        let line = i + 2;
        if row.len() < 4 {
            return Err(Error::parse(
                tasks_path,
                line,
                "expected task_id,kind,context,item_1,...",
            ));
        }
        let kind = TaskKind::parse(&row[1]).ok_or_else(|| {
            Error::parse(tasks_path, line, format!("unknown task kind {:?}", &row[1]))
        })?;
        let context = if row[2].is_empty() {
            Vec::new()
        } else {
            row[2].split(CONTEXT_SEP).map(String::from).collect()
        };
        let display_items: Vec<String> = row
            .iter()
            .skip(3)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        let entry = answers.get_mut(&row[0]).ok_or_else(|| {
            Error::parse(
                tasks_path,
                line,
                format!("task {:?} missing from keyfile", &row[0]),
            )
        })?;
        if entry.0 >= display_items.len() {
            return Err(Error::parse(
                tasks_path,
                line,
                "answer index beyond the item list",
            ));
        }
        entry.1 = true;
        tasks.push(IntruderTask {
            task_id: row[0].to_owned(),
            kind,
            display_items,
            answer_index: entry.0,
            context,
        });
    }
    if let Some((id, _)) = answers.iter().find(|(_, (_, used))| !used) {
        return Err(Error::UnknownTask(id.clone()));
    }
    Ok(tasks)
}

pub fn load_responses(path: &Path) -> Result<ResponseSet> {
    let mut set = ResponseSet::new();
    for (i, row) in reader(path)?.records().enumerate() {
        let row = row.map_err(|e| Error::csv(path, e))?;
        let line = i + 2;
        if row.len() != 3 {
            return Err(Error::parse(
                path,
                line,
                "expected task_id,annotator_id,choice_index",
            ));
        }
        set.push(&row[0], &row[1], parse_position(path, line, &row[2])?);
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intruder::gen_coherence_tasks;

    #[test]
    fn tasks_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let types: Vec<Vec<String>> = (0..3)
            .map(|g| (0..6).map(|i| format!("t{g}w{i}")).collect())
            .collect();
        let mut tasks = gen_coherence_tasks(&types, 5, 1).unwrap();
        tasks[0].context = vec!["ice cream".into(), "a, b".into()];
        let (tp, kp) = (dir.path().join("tasks.csv"), dir.path().join("key.csv"));
        save_tasks(&tasks, &tp).unwrap();
        save_key(&tasks, &kp).unwrap();
        assert_eq!(load_tasks(&tp, &kp).unwrap(), tasks);
        let blind = std::fs::read_to_string(&tp).unwrap();
        assert!(blind.starts_with("task_id,kind,context,item_1,"));
        assert!(!blind.contains("answer"));
    }

    #[test]
    fn responses_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = ResponseSet::new();
        r.push("t1", "a", 0);
        r.push("t1", "b", 5);
        let p = dir.path().join("r.csv");
        save_responses(&r, &p).unwrap();
        assert_eq!(
            std::fs::read_to_string(&p).unwrap(),
            "task_id,annotator_id,choice_index\nt1,a,1\nt1,b,6\n"
        );
        assert_eq!(load_responses(&p).unwrap(), r);
        std::fs::write(&p, "task_id,annotator_id,choice_index\nt1,a,0\n").unwrap();
        let err = load_responses(&p).unwrap_err().to_string();
        assert!(err.contains(":2:"), "{err}");
    }
}
