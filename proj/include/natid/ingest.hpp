#ifndef NATID_INGEST_HPP
#define NATID_INGEST_HPP

#include <cstdint>
#include <filesystem>
#include <string>

#include "natid/model.hpp"

namespace natid::ingest {

// Locates the four JSON-lines files of one dataset. Produced by
// save_dataset and persisted as manifest.json next to the data files.
struct Manifest {
    model::Territory territory;
    std::filesystem::path users_path;
    std::filesystem::path tweets_path;
    std::filesystem::path favourites_path;
    std::filesystem::path edges_path;
    std::int64_t reference_time = 0;
};

// Join warnings accumulated while assembling a Dataset. These are counted,
// not fatal: crawls routinely re-emit profiles and reference users outside
// the collection.
struct IngestStats {
    std::int64_t duplicate_users = 0;
    std::int64_t dropped_tweets = 0;      // author not in users file
    std::int64_t dropped_favourites = 0;  // favouriting user not in users file
    std::int64_t dropped_edges = 0;       // neither endpoint in users file
};

struct LoadResult {
    model::Dataset dataset;
    IngestStats stats;
};

// Parses the four files and joins tweets, favourites and follow edges onto
// their users. Malformed lines raise InputError carrying file and line
// number; missing files raise InputError naming the path.
//
// Follow lists of in-dataset pairs come out symmetric (u lists v as followee
// iff v lists u as follower), so load(save(d)) == d holds for any dataset
// whose lists already satisfy that, which includes everything this module or
// the synthesizer produces.
LoadResult load_dataset(const Manifest& manifest);

// Writes users/tweets/favourites/edges .jsonl plus manifest.json into
// directory (created if needed) and returns the manifest.
Manifest save_dataset(const model::Dataset& dataset,
                      const std::filesystem::path& directory);

// manifest.json helpers; relative file paths resolve against the manifest's
// directory.
Manifest read_manifest(const std::filesystem::path& manifest_path);
void write_manifest(const Manifest& manifest,
                    const std::filesystem::path& manifest_path);

// Convenience: read_manifest(dir / "manifest.json") + load_dataset.
LoadResult load_directory(const std::filesystem::path& directory);

}  // namespace natid::ingest

#endif
