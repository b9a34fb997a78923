#!/usr/bin/env python3
"""Regenerates the labeled seed corpus.

Every document below was written and labeled by hand. The gold span is the
statement body as it appears in the normalized text (ligatures expanded,
line-break hyphenation repaired); offsets are Unicode code points.

Usage: python3 corpus/build_corpus.py  (writes corpus/positives, corpus/negatives)
"""

import json
import pathlib
import re
import unicodedata

ROOT = pathlib.Path(__file__).resolve().parent

LIGATURES = {"ﬀ": "ff", "ﬁ": "fi", "ﬂ": "fl", "ﬃ": "ffi", "ﬄ": "ffl"}


def normalize(text):
    text = unicodedata.normalize("NFC", text)
    for lig, rep in LIGATURES.items():
        text = text.replace(lig, rep)
    text = text.replace("\r\n", "\n").replace("\r", "\n").replace("­", "")
    text = re.sub(r"[ \t]+", " ", text)
    return re.sub(r"-\n(?=[a-z])", "", text)


# (name, text, gold statement body or None, category, canonical links)
POSITIVES = [
    ("p01_zenodo_doi", """Soil Microbial Responses to Drought in Upland Grasslands
Abstract
We measured microbial respiration across 40 plots over three growing seasons. Drought reduced respiration by 30% relative to controls.
Methods
Soil cores were collected monthly and incubated at 20 °C. Respiration was measured with an infrared gas analyser.
Data Availability Statement
The data are openly available in Zenodo at https://doi.org/10.5281/zenodo.100.
Acknowledgements
We thank the field station staff.
""", "The data are openly available in Zenodo at https://doi.org/10.5281/zenodo.100.",
     "repository_deposited", ["10.5281/zenodo.100"]),

    ("p02_sra_inline", """Transcriptomic Signatures of Heat Stress in Wheat
Wheat seedlings were exposed to 38 °C for six hours and sampled at five time points. RNA was sequenced on an Illumina NovaSeq instrument.
Data availability: Raw sequencing reads have been deposited in the NCBI Sequence Read Archive under accession number PRJNA612345.
We thank the sequencing core for technical support.
""", "Data availability: Raw sequencing reads have been deposited in the NCBI Sequence Read Archive under accession number PRJNA612345.",
     "repository_deposited", ["PRJNA612345"]),

    ("p03_dryad_bmc", """Nesting Success of Shorebirds on Restored Saltmarsh
Background
Saltmarsh restoration is expanding across Europe, but its value for breeding shorebirds is unclear.
Results
Nest survival was higher on restored sites than on reference sites.
7. Availability of data and materials
The datasets generated and analysed during the current study are available in the Dryad repository, https://doi.org/10.5061/dryad.abc123.
8. Competing Interests
The authors declare no competing interests.
""", "The datasets generated and analysed during the current study are available in the Dryad repository, https://doi.org/10.5061/dryad.abc123.",
     "repository_deposited", ["10.5061/dryad.abc123"]),

    ("p04_geo_github", """Macrophage Polarization in Chronic Wounds
Methods
Wound biopsies were profiled with Affymetrix arrays and macrophage markers were quantified by flow cytometry.
Data Access Statement
Microarray data are deposited in the Gene Expression Omnibus under accession GSE98765. Analysis scripts are available on GitHub at https://github.com/soil-lab/drought-analysis.
Funding
This work was funded by the Wellcome Trust.
""", "Microarray data are deposited in the Gene Expression Omnibus under accession GSE98765. Analysis scripts are available on GitHub at https://github.com/soil-lab/drought-analysis.",
     "repository_deposited", ["GSE98765", "https://github.com/soil-lab/drought-analysis"]),

    ("p05_osf_hyphenated", """Attention Lapses During Prolonged Driving
Method
Forty participants completed a 90-minute simulated drive while lapses were recorded.
DATA AVAILABILITY
All code and data supporting this study are freely available from the Open Science Frame-
work at https://osf.io/x7k2p/ and from ﬁgshare (https://doi.org/10.6084/m9.figshare.1234567).
References
Dinges DF, Powell JW. Microcomputer analyses of performance on a portable reaction time task. Behav Res Methods. 1985;17:652-655.
""", "All code and data supporting this study are freely available from the Open Science Framework at https://osf.io/x7k2p/ and from figshare (https://doi.org/10.6084/m9.figshare.1234567).",
     "repository_deposited", ["https://osf.io/x7k2p/", "10.6084/m9.figshare.1234567"]),

    ("p06_on_request_heading", """Resilience Among Rural Nurses After the Pandemic
Methods
We surveyed 312 nurses working in rural hospitals using a validated resilience scale.
Data Availability Statement
The data that support the findings of this study are available from the corresponding author upon reasonable request.
Conflict of Interest
None declared.
""", "The data that support the findings of this study are available from the corresponding author upon reasonable request.",
     "on_request", []),

    ("p07_on_request_inline", """Corrosion of Reinforcing Steel in Marine Concrete
Specimens were exposed in a tidal zone for 24 months and corrosion current density was measured monthly.
Data availability: The datasets generated during the current study are available from the corresponding author on reasonable request.
""", "Data availability: The datasets generated during the current study are available from the corresponding author on reasonable request.",
     "on_request", []),

    ("p08_on_request_email", """Grazing Pressure and Alpine Plant Diversity
Results
Species richness declined with grazing intensity at all elevations.
Data Availability
Data are available upon request to the corresponding author (j.smith@example.ac.uk).
""", "Data are available upon request to the corresponding author (j.smith@example.ac.uk).",
     "on_request", []),

    ("p09_on_request_transcripts", """Experiences of Older Adults Using Telehealth
Methods
Semi-structured interviews were conducted with 24 participants and analysed thematically.
Data and Code Availability
The interview transcripts and analysis code can be obtained from the first author upon request.
Ethics
The study was approved by the university research ethics committee.
""", "The interview transcripts and analysis code can be obtained from the first author upon request.",
     "on_request", []),

    ("p10_on_request_statement_inline", """Thermal Tolerance of Intertidal Snails
We measured critical thermal maxima for 14 species collected along a latitudinal gradient.
Data Availability Statement: Data supporting the findings of this study are available from the authors on reasonable request.
""", "Data Availability Statement: Data supporting the findings of this study are available from the authors on reasonable request.",
     "on_request", []),

    ("p11_in_paper_bmc", """Vitamin D Status in Adolescent Athletes
Methods
Serum 25-hydroxyvitamin D was measured in 150 athletes during winter.
Data Availability Statement
All data generated or analysed during this study are included in this published article and its supplementary information files.
""", "All data generated or analysed during this study are included in this published article and its supplementary information files.",
     "in_paper_or_supplement", []),

    ("p12_in_paper_plos", """Foraging Behaviour of Urban Foxes
Fox movements were tracked with GPS collars for two years across three cities.
Data Availability: All relevant data are within the manuscript and its Supporting Information files.
Funding: The authors received no specific funding for this work.
""", "Data Availability: All relevant data are within the manuscript and its Supporting Information files.",
     "in_paper_or_supplement", []),

    ("p13_in_paper_table", """Drought Indices for Mediterranean Catchments
Results
The standardized precipitation index captured 85% of observed drought events.
Availability of Data and Materials
The raw measurements are provided in Supplementary Table S3, and the derived indices are given in the main text.
""", "The raw measurements are provided in Supplementary Table S3, and the derived indices are given in the main text.",
     "in_paper_or_supplement", []),

    ("p14_in_paper_two_sentences", """Household Energy Use and Fuel Poverty
Methods
A national survey of 2,400 households recorded energy expenditure and indoor temperature.
Data Availability
The data underlying this article are available in the article and in its online supplementary material. Further details of the survey instrument are given in Appendix A.
Acknowledgements
We thank all participating households.
""", "The data underlying this article are available in the article and in its online supplementary material. Further details of the survey instrument are given in Appendix A.",
     "in_paper_or_supplement", []),

    ("p15_in_paper_inline", """Phosphorus Retention in Constructed Wetlands
Inflow and outflow phosphorus concentrations were sampled weekly for three years.
Data availability statement: The data supporting the conclusions of this article are included within the article (Tables 1–3) and Supplementary Data 1.
""", "Data availability statement: The data supporting the conclusions of this article are included within the article (Tables 1–3) and Supplementary Data 1.",
     "in_paper_or_supplement", []),

    ("p16_restricted_privacy", """Sleep Duration and Academic Performance
Methods
Actigraphy was recorded for 200 undergraduate students over four weeks.
Data Availability Statement
The data are not publicly available due to privacy and ethical restrictions.
""", "The data are not publicly available due to privacy and ethical restrictions.",
     "restricted_conditional", []),

    ("p17_restricted_licence", """Regional Wage Inequality in Britain
Results
Wage dispersion increased in all regions between 2005 and 2019.
Data Availability
The data that support the findings of this study are available from the UK Data Service, but restrictions apply to the availability of these data, which were used under licence for the current study, and so are not publicly available.
""", "The data that support the findings of this study are available from the UK Data Service, but restrictions apply to the availability of these data, which were used under licence for the current study, and so are not publicly available.",
     "restricted_conditional", []),

    ("p18_restricted_inline", """Outcomes of Early Mobilisation After Hip Fracture
We analysed records of 1,200 patients treated at four hospitals.
Data availability: Participant-level data cannot be shared publicly because of confidentiality agreements; anonymised summary data are available from the corresponding author on reasonable request with approval of the ethics committee.
""", "Data availability: Participant-level data cannot be shared publicly because of confidentiality agreements; anonymised summary data are available from the corresponding author on reasonable request with approval of the ethics committee.",
     "restricted_conditional", []),

    ("p19_restricted_agreement", """Predicting Sepsis From Electronic Health Records
Methods
A gradient boosted model was trained on vital signs and laboratory results.
Data Access Statement
Due to the sensitive nature of the clinical records, the data are available only to approved researchers under a data access agreement with the hospital trust.
""", "Due to the sensitive nature of the clinical records, the data are available only to approved researchers under a data access agreement with the hospital trust.",
     "restricted_conditional", []),

    ("p20_restricted_permission", """Farm Size and Fertiliser Use in Ireland
Results
Larger farms applied less nitrogen per hectare.
Data Availability Statement
Restrictions apply to the availability of these data. Data were obtained from the National Farm Survey and are available with the permission of the Department of Agriculture.
""", "Restrictions apply to the availability of these data. Data were obtained from the National Farm Survey and are available with the permission of the Department of Agriculture.",
     "restricted_conditional", []),

    ("p21_no_data_created", """A Framework for Evaluating Open Peer Review
Argument
We propose four criteria for evaluating open peer review models.
Data Availability Statement
No new data were created or analysed in this study.
""", "No new data were created or analysed in this study.",
     "not_available", []),

    ("p22_no_data_sharing", """Ethics of Algorithmic Triage
Discussion
We discuss fairness constraints for triage algorithms in emergency care.
Data Availability
Data sharing is not applicable to this article as no new data were created or analyzed in this study.
""", "Data sharing is not applicable to this article as no new data were created or analyzed in this study.",
     "not_available", []),

    ("p23_no_data_inline", """Stability of Fractional Delay Systems
We prove sufficient conditions for asymptotic stability of a class of fractional delay equations.
Data availability statement: No data was used for the research described in the article.
""", "Data availability statement: No data was used for the research described in the article.",
     "not_available", []),

    ("p24_no_data_not_applicable", """A Note on Prime Gaps
Introduction
We give an elementary bound for gaps between consecutive primes.
Availability of data and materials
Not applicable. This theoretical study did not generate or analyse any datasets.
""", "Not applicable. This theoretical study did not generate or analyse any datasets.",
     "not_available", []),

    ("p25_no_data_method", """Fast Approximate Nearest Neighbour Search
Method
We describe a graph-based index with logarithmic query time.
Data Availability Statement
This article describes a computational method; no datasets were generated during the current study.
""", "This article describes a computational method; no datasets were generated during the current study.",
     "not_available", []),

    ("p26_unspecified_future", """Coral Bleaching Thresholds in the Red Sea
Results
Bleaching began at 1.5 °C above the maximum monthly mean.
Data Availability Statement
The datasets generated during the current study will be made available.
""", "The datasets generated during the current study will be made available.",
     "unspecified_present", []),

    ("p27_unspecified_policy", """Microplastics in Freshwater Sediments
Methods
Sediments from 30 lakes were sieved and particles identified by FTIR spectroscopy.
Data Availability
Data will be shared in accordance with the funder's open data policy.
""", "Data will be shared in accordance with the funder's open data policy.",
     "unspecified_present", []),

    ("p28_unspecified_bare", """Reading Fluency in Bilingual Children
Methods
We assessed 180 children in two languages at ages 7 and 9.
Data and Code Availability
The underlying data and code for this study are available.
""", "The underlying data and code for this study are available.",
     "unspecified_present", []),

    ("p29_unspecified_embargo", """Public Attitudes to Carbon Taxes
Methods
A representative online survey was fielded in six countries.
Data Access Statement
The survey data will be released publicly at the end of the embargo period.
""", "The survey data will be released publicly at the end of the embargo period.",
     "unspecified_present", []),

    ("p30_unspecified_caps", """Hydraulic Traits of Tropical Lianas
Results
Lianas had wider vessels than co-occurring trees.
DATA AVAILABILITY STATEMENT
Supporting data for this article is available.
""", "Supporting data for this article is available.",
     "unspecified_present", []),
]

NEGATIVES = [
    ("n01_methods_software", """Statistical Analysis of Crop Yields
Data were analysed using R version 4.2. Publicly available software packages were used for all statistical tests.
"""),
    ("n02_reference_dataset", """Long-Term Soil Respiration Trends
Methods
We reused the publicly available dataset of Smith and Lee [12], deposited in Zenodo.
References
[12] Smith J, Lee K (2019) Soil respiration measurements, 2015–2018. Zenodo. https://doi.org/10.5281/zenodo.2234.
"""),
    ("n03_underlying_collected", """Snowpack Variability in the Alps
The underlying data were collected between 2015 and 2018 at three field stations. Details are given in the supplementary material.
"""),
    ("n04_supporting_hypothesis", """Mitochondrial Stress and Ageing in Yeast
Supporting data for the hypothesis come from three independent experiments. Strain construction is described in the supplementary information.
"""),
    ("n05_data_sharing_topic", """Data Sharing Between Hospitals
Data sharing between hospitals improves the quality of registries. We reviewed 40 data sharing agreements.
"""),
    ("n06_meta_research", """How Often Do Ecologists Share Data?
We examined whether data availability statements in 500 ecology papers linked to a repository. Only 40% of data availability statements included a persistent identifier.
"""),
    ("n07_simulation_datasets", """Turbulent Mixing in Stratified Flows
The datasets generated by the simulation were large (4 TB) and were processed on the university cluster. Simulation code was adapted from an earlier version on GitHub.
"""),
    ("n08_genbank_methods", """Phylogeny of Freshwater Mussels
Sequences were aligned to the reference genome (GenBank accession NC_000913) using MAFFT.
"""),
    ("n09_expression_subset", """Drug Response in Cancer Cell Lines
Expression data are available for only 12 of the 40 cell lines, so we restricted the analysis to those. The corresponding author performed the hybridization.
"""),
    ("n10_review_argument", """Reusability of Ecological Data
In this review, we argue that data are available in principle but rarely reusable in practice.
"""),
    ("n11_acknowledgements", """Seabird Diet Over Four Decades
Acknowledgements
We thank the Dryad and Zenodo teams for helpful discussions. Funding was provided by NERC.
"""),
    ("n12_repository_comparison", """Comparing Research Data Repositories
We compared the metadata schemas of Zenodo, Dryad, Figshare and Dataverse. GitHub was used to track changes to the comparison tables.
"""),
    ("n13_primer_supplement", """Quantifying Gene Expression in Roots
Primer sequences are listed in the supplementary material. The corresponding author designed the primers.
"""),
    ("n14_reference_title", """Replication in Psychology
Introduction
Replication rates remain low in many fields [3].
References
[3] Jones A. Data availability in psychology: a survey. J Open Sci. 2020;4:12–19.
"""),
    ("n15_geo_reanalysis", """Immune Gene Modules in Sepsis
We downloaded publicly available expression profiles from the Gene Expression Omnibus (accession GSE4567) and ArrayExpress. Modules were identified by weighted correlation network analysis.
"""),
    ("n16_reanalysis_product", """Heatwave Frequency in Southern Europe
We used the openly available ERA5 reanalysis product (Hersbach et al. 2020) to derive daily maximum temperature. The product is deposited in the Copernicus Climate Data Store archive.
"""),
    ("n17_ethics", """Physical Activity in Older Adults
The study protocol was approved by the ethics committee (ref. 2019/334). Informed consent was obtained from all participants.
"""),
    ("n18_funding", """Survey Methods Training
This work was supported by the UK Data Service capacity building fund.
"""),
    ("n19_software_hosted", """A Tool for Scanning Manuscripts
The source code of the tool is hosted on GitHub at https://github.com/example/tool.
"""),
    ("n20_model_interpolation", """Gridded Precipitation Over Africa
When no data is available for a grid cell, the model interpolates from neighbouring cells. Interpolation follows the supplementary information of Lee et al. (2018).
"""),
    ("n21_future_work", """Barriers to Open Science in Engineering
Future work should make the underlying data openly available to other researchers.
"""),
    ("n22_worldclim", """Species Distribution Models for Alpine Plants
Climate data were taken from WorldClim (Fick & Hijmans 2017; https://www.worldclim.org).
"""),
    ("n23_herbarium", """Digitising a Regional Herbarium
Each specimen received an accession number from the herbarium upon arrival.
"""),
    ("n24_plasmids_request", """Engineering Fluorescent Reporters
Plasmids are available from the corresponding author upon reasonable request.
"""),
    ("n25_resolution_condition", """Mapping Urban Heat Islands
Analyses are only possible when the data are available at sufficient resolution. We relied on publicly available satellite imagery.
"""),
    ("n26_review_deposited", """Citation Advantage of Open Data
Deposited in repositories such as Dryad, datasets gain citations over time.
"""),
    ("n27_model_literature", """A Mechanistic Model of Root Growth
Supporting data for the model were compiled from the literature (see Supplementary Information).
"""),
    ("n28_abstract", """Wind Loads on Tall Buildings
Abstract
We measured surface pressures on a 1:300 scale model in a boundary layer wind tunnel.
"""),
    ("n29_data_words", """Seasonal Signals in River Chemistry
The data show a strong seasonal signal. Data quality was checked manually.
"""),
    ("n30_biobank_access", """Access Procedures at European Biobanks
Controlled data access procedures were evaluated at five biobanks.
"""),
]


def write_doc(directory, name, text, spans):
    directory.mkdir(parents=True, exist_ok=True)
    (directory / f"{name}.txt").write_text(text, encoding="utf-8")
    (directory / f"{name}.gold.json").write_text(
        json.dumps({"spans": spans}, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def main():
    for name, text, statement, category, links in POSITIVES:
        normalized = normalize(text)
        start = normalized.find(statement)
        if start < 0:
            raise SystemExit(f"{name}: gold statement not found in normalized text")
        span = {"start": start, "end": start + len(statement), "category": category, "links": links}
        write_doc(ROOT / "positives", name, text, [span])
    for name, text in NEGATIVES:
        write_doc(ROOT / "negatives", name, text, [])


if __name__ == "__main__":
    main()
