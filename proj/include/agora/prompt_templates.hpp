#pragma once

#include <string_view>

namespace agora {
// Verbatim prompt templates, placeholders in braces. Do not edit: the
// golden-template tests compare these byte-for-byte against the files
// under tests/fixtures/prompts/.

inline constexpr std::string_view kTopicPrompt = R"TMPL(Randomly generate a diverse chat topic and give me the topic itself without anything else.)TMPL";

inline constexpr std::string_view kRolePromptTemplate = R"TMPL(Generate a specific social identity and social role that is ordinary, common, diverse and follows real social distribution patterns. The name should be 'Person {i+1}'
(Important: use this name directly, do not create another real name!)
Respond with only the description, no additional text or markdown.)TMPL";

inline constexpr std::string_view kUtterancePromptTemplate = R"TMPL(You are assigned the following role:
Person {i}
{Social Role}

The chat topic is:
{Topic}

Here is the previous conversation history:
{Chat History}

Based on your role, you have two options:
1. Contribute to the conversation.
2. Remain silent and listen.

If your contribution would be repetitive, irrelevant, or if the topic seems concluded, respond only with: "Stay silent".  
Otherwise, respond with: "Speak: [your message]"

Guidelines:
- Keep the response brief (2-3 sentences).  
- Do not introduce yourself or restate your role.  )TMPL";

inline constexpr std::string_view kOpeningPromptTemplate = R"TMPL(You are assigned the following role:
Person {i}
{Social Role}

The chat topic is:
{Topic}

Respond with: "Speak: [your message]"

Guidelines:
- Keep the response brief (2-3 sentences).  
- Do not introduce yourself or restate your role.  )TMPL";

inline constexpr std::string_view kIscoPromptTemplate = R"TMPL(You are an expert in occupational classification.
Below is the ISCO-08 classification of occupations into 10 major groups.
Each group has a code, title, and definition.

Your task: Given a description of a social role, choose the single most appropriate group by providing the ISCO code and title.

### ISCO-08 Major Groups ###
Code: 1
Title: Managers
Definition: Managers plan, direct, coordinate and evaluate the overall activities of enterprises, governments and other organizations, or of organizational units within them, and formulate and review their policies, laws, rules and regulations. Competent performance in most occupations in this major group requires skills at the fourth ISCO skill level, except for Sub-major group 14: Hospitality, Retail and Other Services Managers, for which skills at the third ISCO skill level are generally required.
Tasks include: Tasks performed by managers usually include: formulating and advising on the policy, budgets, laws and regulations of enterprises, governments and other organizational units; establishing objectives and standards and formulating and evaluating programmes and policies and procedures for their implementation; ensuring appropriate systems and procedures are developed and implemented to provide budgetary control; authorising material, human and financial resources to implement policies and programmes; monitoring and evaluating performance of the organization or enterprise and of its staff; selecting or approving the selection of  staff; ensuring compliance with health and safety requirements; planning and directing daily operations; representing and negotiating on behalf of the government, enterprise or organizational unit managed in meetings and other forums.
Included occupations: Occupations in this major group are classified into the following sub-major groups:
11 Chief executives, Senior Officials and Legislators
12 Administrative and Commercial Managers
13 Production and Specialized Services Managers
14 Hospitality, Retail and Other Services Managers

Code: 2
Title: Professionals
Definition: Professionals increase the existing stock of knowledge; apply scientific or artistic concepts and theories; teach about the foregoing in a systematic manner; or engage in any combination of these activities. Competent performance in most occupations in this major group requires skills at the fourth ISCO skill level.
Tasks include: Tasks performed by professionals usually include: conducting analysis and  research, and developing concepts, theories and operational methods; advising on or applying existing knowledge related to physical sciences, mathematics, engineering and technology, life sciences, medical and health services, social sciences and humanities; teaching the theory and practice of one or more disciplines at different educational levels; teaching and educating persons with learning difficulties or special needs; providing various business, legal and social services; creating and performing works of art; providing spiritual guidance; preparing scientific papers and reports. Supervision of other workers may be included.
Included occupations: Occupations in this major group are classified into the following sub-major groups:
21 Science and Engineering Professionals
22 Health Professionals
23 Teaching Professionals
24 Business and Administration Professionals
25 Information and Communications Technology Professionals
26 Legal, Social and Cultural Professionals

Code: 3
Title: Technicians and Associate Professionals
Definition: Technicians and associate professionals perform technical and related tasks connected with research and the application of scientific or artistic concepts and operational methods, and government or business regulations. Competent performance in most occupations in this major group requires skills at the third ISCO skill level.
Tasks include: Tasks performed by technicians and associate professionals usually include: undertaking and carrying out technical work connected with research and the application of concepts and operational methods in the fields of physical sciences including engineering and technology, life sciences including the medical profession, and social sciences and humanities; initiating and carrying out various technical services related to trade, finance and administration including administration of government laws and regulations, and to social work; providing technical support for the arts and entertainment; participating in sporting activities; executing some religious tasks. Supervision of other workers may be included.
Included occupations: Occupations in this major group are classified into the following sub-major groups:
31 Science and Engineering Associate Professionals
32 Health Associate Professionals
33 Business and Administration Associate Professionals
34 Legal, Social, Cultural and Related Associate Professionals
35 Information and Communications Technicians

Code: 4
Title: Clerical Support Workers
Definition: Clerical support workers record, organise, store, compute and retrieve information, and perform a number of clerical duties in connection with money-handling operations, travel arrangements, requests for information, and appointments. Competent performance in most occupations in this major group requires skills at the second ISCO skill level.
Tasks include: Tasks performed by clerical support workers usually include: stenography, typing, and operating word processors and other office machines; entering data into computers; carrying out secretarial duties; recording and computing numerical data; keeping records relating to stocks, production and transport; keeping records relating to passenger and freight transport; carrying out clerical duties in libraries; filing documents; carrying out duties in connection with mail services; preparing and checking material for printing; assisting persons who cannot read or write with correspondence; performing money-handling operations; dealing with travel arrangements; supplying information requested by clients and making appointments; operating a telephone switchboard. Supervision of other workers may be included.
Included occupations: Occupations in this major group are classified into the following sub-major groups:
41 General and Keyboard Clerks
42 Customer Services Clerks
43 Numerical and Material Recording Clerks
44 Other Clerical Support Workers

Code: 5
Title: Service and Sales Workers
Definition: Service and sales workers provide personal and protective services related to travel, housekeeping, catering, personal care, or protection against fire and unlawful acts, or demonstrate and sell goods in wholesale or retail shops and similar establishments, as well as at stalls and on markets. Competent performance in most occupations in this major group requires skills at the second ISCO skill level.
Tasks include: Tasks performed by service and sales workers usually include: organizing and providing services during travel; housekeeping; preparing and serving of food and beverages; caring for children; providing personal and basic health care at homes or in institutions, as well as hairdressing, beauty treatment and companionship; telling fortunes; embalming and arranging funerals; providing security services and protecting individuals and property against fire and unlawful acts; enforcing of law and order; posing as models for advertising, artistic creation and display of goods; selling goods in wholesale or retail establishments, as well as at stalls and on markets; demonstrating goods to potential customers. Supervision of other workers may be included.
Included occupations: Occupations in this major group are classified into the following sub-major groups:
51 Personal Service Workers
52 Sales Workers
53 Personal Care Workers
54 Protective Services Workers

Code: 6
Title: Skilled Agricultural, Forestry and Fishery Workers
Definition: Skilled agricultural, forestry and fishery workers grow and harvest field or tree  and shrub crops, gather wild fruits and plants, breed, tend or hunt animals, produce a variety of animal husbandry products; cultivate, conserve and exploit forests; breed or catch fish; and cultivate or gather other forms of aquatic life in order to provide food, shelter and income for themselves and  their households. Competent performance in most occupations in this major group requires skills at the second ISCO skill level.
Tasks include: Tasks performed by skilled agricultural, forestry and fishery workers usually include: preparing the soil; sowing, planting, spraying, fertilizing and harvesting field crops; growing fruit and other tree and shrub crops; growing garden vegetables and horticultural products; gathering wild fruits and plants; breeding, raising, tending or hunting animals mainly to obtain meat, milk, hair, fur, skin, sericultural, apiarian or other products; cultivating, conserving and exploiting forests; breeding or catching fish; cultivating or gathering other forms of aquatic life; storing and carrying out some basic processing of their produce; selling their products to purchasers, marketing organisations or at markets. Supervision of other workers may be included.
Included occupations: Occupations in this major group are classified into the following sub-major groups:
61 Market-oriented Skilled Agricultural Workers
62 Market-oriented Skilled Forestry, Fishery and Hunting Workers
63 Subsistence Farmers, Fishers, Hunters and Gatherers

Code: 7
Title: Craft and Related Trades Workers
Definition: Craft and related trades workers apply specific technical and practical knowledge and skills in the fields to construct and maintain buildings; form metal; erect metal structures; set machine tools or make, fit, maintain and repair machinery, equipment or tools; carry out printing work; and produce or process foodstuffs, textiles and wooden, metal and other articles, including handicraft goods. Competent performance in most occupations in this major group requires skills at the second ISCO skill level.
The work is carried out by hand and by hand-powered and other tools which are used to reduce the amount of physical effort and time required for specific tasks, as well as to improve the quality of the products. The tasks call for an understanding of all stages of the production process, the materials and tools used, and the nature and purpose of the final product.
Tasks include: Tasks performed by craft and related trades workers usually include: constructing, maintaining and repairing buildings and other structures; casting, welding and shaping metal; installing and erecting heavy metal structures, tackle and related equipment; making machinery, tools, equipment and other metal articles; setting for operators, or setting and operating various machine tools; fitting, maintaining and repairing industrial machinery, engines, vehicles, electrical and electronic instruments and other equipment; making precision instruments, jewellery, household and other precious metal articles, pottery, glass and related products; producing handicrafts; executing printing work; producing and processing foodstuffs and various articles made of wood, textiles, leather and related materials. Supervision of other workers may be included.  Self-employed craft and related trades workers, who operate their own businesses either independently or with assistance from a small number of others, may also perform a range of tasks associated with management of the business, account and record keeping and client service, although such tasks would not normally comprise the major component of the work.
Included occupations: Occupations in this major group are classified into the following sub-major groups:
71 Building and Related Trades Workers (excluding Electricians)
72 Metal, Machinery and Related Trades Workers
73 Handicraft and Printing Workers
74 Electrical and Electronic Trades Workers
75 Food processing, Woodworking, Garment and Other Craft and Related Trades Workers

Code: 8
Title: Plant and Machine Operators, and Assemblers
Definition: Plant and machine operators, and assemblers operate and monitor industrial and agricultural machinery and equipment on the spot or by remote control; drive and operate trains, motor vehicles and mobile machinery and equipment; or assemble products from component parts according to strict specifications and procedures. Competent performance in most occupations in this major group requires skills at the second ISCO skill level.

The work mainly calls for experience with and an understanding of industrial and agricultural machinery and equipment as well as an ability to cope with machine-paced operations and to adapt to technological innovations.
Tasks include: Tasks performed by plant and machine operators and assemblers usually include: operating and monitoring mining or other industrial machinery and equipment for processing metal, minerals, glass, ceramics, wood, paper or chemicals; operating and monitoring machinery and equipment used to produce articles made of metal, minerals, chemicals, rubber, plastics, wood, paper, textiles, fur or leather, and which process foodstuffs and related products; driving and operating trains and motor vehicles; driving, operating and monitoring mobile industrial and agricultural machinery and equipment; assembling products from component parts according to strict specifications and procedures. Supervision of other workers may be included.
Included occupations: Occupations in this major group are classified into the following sub-major groups:
81 Stationary Plant and Machine Operators
82 Assemblers
83 Drivers and Mobile Plant Operators

Code: 9
Title: Elementary Occupations
Definition: Elementary occupations involve the performance of simple and routine tasks which may require the use of hand-held tools and considerable physical effort. Most occupations in this major group require skills at the first ISCO skill level.
Tasks include: Tasks performed by workers in elementary occupations usually include: cleaning, restocking supplies and performing basic maintenance in apartments, houses, kitchens, hotels, offices and other buildings; washing cars and windows; helping in kitchens and performing simple tasks in food preparation; delivering messages or goods; carrying luggage and handling baggage and freight; stocking vending machines or reading and emptying meters; collecting and sorting refuse; sweeping streets and similar places; performing various simple farming, fishing, hunting or trapping tasks; performing simple tasks connected with mining, construction and manufacturing including product-sorting; packing and unpacking produce by hand and filling shelves; providing various street services; pedalling or hand-guiding vehicles to transport passengers and goods; driving animal-drawn vehicles or machinery. Supervision of other workers may be included.
Included occupations: Occupations in this major group are classified into the following sub-major groups:
91 Cleaners and Helpers
92 Agricultural, Forestry and Fishery Labourers
93 Labourers in Mining, Construction, Manufacturing and Transport
94 Food Preparation Assistants
95 Street and Related Sales and Service Workers
96 Refuse Workers and Other Elementary Workers

Code: 0
Title: Armed Forces Occupations
Definition: Armed forces occupations include all jobs held by members of the armed forces. Members of the armed forces are those personnel who are currently serving in the armed forces, including auxiliary services, whether on a voluntary or compulsory basis, and who are not free to accept civilian employment and are subject to military discipline. Included are regular members of the army, navy, air force and other military services, as well as conscripts enrolled for military training or other service for a specified period.
Tasks include: nan
Included occupations: Occupations in this major group are classified into the following sub-major groups:
01  Commissioned Armed Forces Officers
02  Non-commissioned Armed Forces Officers
03  Armed Forces Occupations, Other Ranks

### Social Role Description ###
{Social Role}

### Your Answer ###
Provide the ISCO code (0-9) only.)TMPL";

}  // namespace agora
