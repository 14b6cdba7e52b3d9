#pragma once

#include <sstream>
#include <string>

#include "citemap/graph.hpp"

namespace testing_util {

inline citemap::IngestResult ingest_text(const std::string& nodes, const std::string& edges,
                                         citemap::IngestOptions options = {},
                                         citemap::TableFormat format = citemap::TableFormat::csv) {
    std::istringstream n(nodes), e(edges);
    return citemap::ingest(n, format, e, options);
}

/// A(1990) <- B(2000) <- C(2010): C cites B, B cites A.
inline citemap::CitationGraph chain() {
    return ingest_text("paper_id,date,author_ids,country\nA,1990,a1,US\nB,2000,a1,US\nC,2010,a2,US\n",
                       "citing_id,cited_id\nC,B\nB,A\n")
        .graph;
}

}  // namespace testing_util
