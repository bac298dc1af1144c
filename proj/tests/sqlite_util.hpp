#pragma once

#include <map>
#include <string>
#include <vector>

#include <sqlite3.h>

namespace sqlite_util {

struct Reload {
    std::string error;
    std::map<std::string, std::size_t> rows;
    std::size_t foreignKeyViolations = 0;
};

// Executes a dump in a fresh in-memory database with foreign keys enforced
// and counts the rows of every table.
inline Reload reload(const std::string& dump) {
    Reload out;
    sqlite3* db = nullptr;
    if (sqlite3_open(":memory:", &db) != SQLITE_OK) {
        out.error = "cannot open sqlite";
        return out;
    }
    char* err = nullptr;
    auto exec = [&](const std::string& sql, int (*cb)(void*, int, char**, char**), void* arg) {
        if (sqlite3_exec(db, sql.c_str(), cb, arg, &err) != SQLITE_OK) {
            out.error = err ? err : "sqlite error";
            sqlite3_free(err);
            return false;
        }
        return true;
    };
    if (exec("PRAGMA foreign_keys = ON;", nullptr, nullptr) && exec(dump, nullptr, nullptr)) {
        std::vector<std::string> tables;
        exec("SELECT name FROM sqlite_master WHERE type='table' ORDER BY name;",
             [](void* arg, int, char** v, char**) {
                 static_cast<std::vector<std::string>*>(arg)->push_back(v[0]);
                 return 0;
             },
             &tables);
        for (const auto& t : tables) {
            std::size_t n = 0;
            exec("SELECT COUNT(*) FROM " + t + ";",
                 [](void* arg, int, char** v, char**) {
                     *static_cast<std::size_t*>(arg) = std::stoul(v[0]);
                     return 0;
                 },
                 &n);
            out.rows[t] = n;
        }
        exec("PRAGMA foreign_key_check;",
             [](void* arg, int, char**, char**) {
                 ++*static_cast<std::size_t*>(arg);
                 return 0;
             },
             &out.foreignKeyViolations);
    }
    sqlite3_close(db);
    return out;
}

}  // namespace sqlite_util
