#pragma once

#include <string>

#include "exec/executor.hpp"
#include "exec/relation.hpp"

namespace semql {

// CSV with header row; empty fields are NULL; quoting per RFC 4180.
Relation read_csv(const std::string& path, const std::string& table, const TableSchema& schema);
void write_csv(const std::string& path, const Relation& relation);

// Directory-of-CSVs dataset: <dir>/catalog.json plus one <table>.csv per
// catalog table.
Dataset load_dataset(const std::string& dir, const Catalog& catalog);
Catalog load_dataset_catalog(const std::string& dir);
void write_dataset(const std::string& dir, const Catalog& catalog, const Dataset& data);

}  // namespace semql
