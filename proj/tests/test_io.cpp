// SPDX-License-Identifier: Apache-2.0
//
// beamlearn: decentralized interference-aware beam codebook learning
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace beamlearn;
using namespace testing_support;

TEST(CodebookCsv, RoundTripOnRandomCodebooks)
{
    Rng rng(1);
    ScratchDir dir("csv");
    for (int trial = 0; trial < 50; ++trial)
    {
        const PhaseSet p = random_phase_set(rng);
        const std::size_t M = random_size(rng, 1, 64), N = random_size(rng, 1, 20);
        std::vector<QuantizedBeam> beams;
        for (std::size_t n = 0; n < N; ++n)
            beams.push_back(random_beam(M, p, rng));
        const Codebook cb(beams);
        write_codebook_csv(dir / "cb.csv", cb);
        EXPECT_EQ(read_codebook_csv(dir / "cb.csv", p), cb);
    }
}

TEST(CodebookCsv, HeaderLayout)
{
    ScratchDir dir("csv_head");
    const Codebook cb({QuantizedBeam(std::vector<QuantizedBeam::Index>{3, 0, 15}, PhaseSet(4))});
    write_codebook_csv(dir / "cb.csv", cb);
    EXPECT_EQ(slurp(dir / "cb.csv"), "beam_id,p0,p1,p2\n0,3,0,15\n");
}

TEST(CodebookCsv, MalformedFilesAreFormatErrors)
{
    ScratchDir dir("csv_bad");
    const std::pair<const char *, const char *> cases[] = {
        {"noheader", "0,1,2\n"},
        {"badid", "beam_id,p0,p1\n1,0,0\n"},
        {"badint", "beam_id,p0,p1\n0,x,0\n"},
        {"negative", "beam_id,p0,p1\n0,-1,0\n"},
        {"toolarge", "beam_id,p0,p1\n0,16,0\n"},
        {"ragged", "beam_id,p0,p1\n0,1,2\n1,1\n"},
        {"empty", "beam_id,p0,p1\n"},
        {"idonly", "beam_id\n0\n"},
    };
    for (const auto &[name, body] : cases)
    {
        std::ofstream(dir / name) << body;
        EXPECT_THROW(read_codebook_csv(dir / name, PhaseSet(4)), FormatError) << name;
    }
    EXPECT_THROW(read_codebook_csv(dir / "missing", PhaseSet(4)), FormatError);
}

TEST(CodebookCsv, ToleratesCrlf)
{
    ScratchDir dir("csv_crlf");
    std::ofstream(dir / "cb.csv") << "beam_id,p0,p1\r\n0,1,2\r\n";
    const Codebook cb = read_codebook_csv(dir / "cb.csv", PhaseSet(2));
    EXPECT_EQ(cb[0].indices()[1], 2);
}

TEST(CsvWriter, InfinitiesAndPrecision)
{
    ScratchDir dir("csv_w");
    {
        CsvWriter w(dir / "x.csv");
        w.row("a", "b", "c");
        w.row(std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.1);
    }
    EXPECT_EQ(slurp(dir / "x.csv"), "a,b,c\ninf,-inf,0.10000000000000001\n");
    EXPECT_THROW(CsvWriter("/nonexistent/dir/x.csv"), std::runtime_error);
}

TEST(Writers, HeadersAndRowCounts)
{
    ScratchDir dir("writers");
    auto lines = [&](const std::string &name)
    {
        const std::string s = slurp(dir / name);
        return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
    };
    auto header = [&](const std::string &name)
    {
        const std::string s = slurp(dir / name);
        return s.substr(0, s.find('\n'));
    };

    std::vector<std::vector<TrainingLogRow>> logs(2, std::vector<TrainingLogRow>(3));
    write_training_log_csv(dir / "log.csv", logs);
    EXPECT_EQ(header("log.csv"), "step,beam_index,gain_est,interf_est,reward,epsilon,best_gain,best_interf");
    EXPECT_EQ(lines("log.csv"), 7u);

    write_measurement_log_csv(dir / "m.csv", {{0, 0xabcULL, 'I', 1.5}, {0, 0xabcULL, 'S', 2.5}});
    EXPECT_EQ(header("m.csv"), "step,beam_hash,slot_type,sample_value");
    EXPECT_NE(slurp(dir / "m.csv").find(",SI,"), std::string::npos);

    write_cluster_csv(dir / "c.csv", {{0, 5, 1}, {1, 6, 0}});
    EXPECT_EQ(header("c.csv"), "bs,user_id,cluster_id");
    EXPECT_EQ(lines("c.csv"), 3u);

    RocCurve rc;
    rc.p_measurements = 3;
    rc.points = {{1.0, 0.5, 0.25}};
    write_roc_csv(dir / "roc.csv", {rc});
    EXPECT_EQ(lines("roc.csv"), 2u);
}
