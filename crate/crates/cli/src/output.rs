//! Delimited table output to stdout or a file.

use std::fs::File;
use std::io::{self, Write};

use anyhow::Context;

use crate::{Cli, Format};

pub struct Table {
    writer: csv::Writer<Box<dyn Write>>,
}

impl Table {
    pub fn new(cli: &Cli, header: &[&str]) -> anyhow::Result<Self> {
        let sink: Box<dyn Write> = match &cli.out {
            Some(path) => Box::new(io::BufWriter::new(
                File::create(path).with_context(|| format!("creating {}", path.display()))?,
            )),
            None => Box::new(io::BufWriter::new(io::stdout().lock())),
        };
        let delimiter = match cli.format {
            Format::Csv => b',',
            Format::Tsv => b'\t',
        };
        let mut writer = csv::WriterBuilder::new().delimiter(delimiter).from_writer(sink);
        writer.write_record(header)?;
        Ok(Self { writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> anyhow::Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> crate::Outcome {
        self.writer.flush().context("flushing output")?;
        Ok(())
    }
}
